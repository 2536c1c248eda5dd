//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines come out in order and
//! unbuffered. The process fails on any red criterion except those listed in
//! `KNOWN_RED`, which still print FAIL with their measured values.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use doublon::dynamics::{evolve, EvolveConfig, StateVector};
use doublon::fit::linear;
use doublon::model::{Boundary, DoubleExcitationBasis, Emitter, EmitterSet, Label, WaveguideParams};
use doublon::reduced::DoublonRing;
use doublon::spectrum::{classify_doublons, two_excitation_spectrum, HowMany, DEFAULT_BUNCHING_THRESHOLD};
use doublon::sweep::{
    analyse_dynamics, run_fourbody, two_pair_layout, DynamicsAnalysis, Experiment, FourBodyRun, FourBodySettings, RunConfig,
};
use doublon::theory::{branch_energy, green_f, solve_bands, Branch, Channel};
use num_complex::Complex64;

mod common;
use common::{dense_propagate, integrate, Draws};

/// Criteria whose red result is analysed in the README; the named sub-check
/// is the only one allowed to fail.
const KNOWN_RED: &[(u32, &str)] = &[(2, "doublon eigenvalues on band roots"), (4, "P2 > 5 P1")];

/// Lattice size of the four-body runs.
const N_FOURBODY: usize = 161;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn baseline(n: usize, boundary: Boundary) -> WaveguideParams {
    WaveguideParams::new(1.0, 4.0, 0.2, n, boundary).unwrap()
}

fn c1() -> Vec<Check> {
    let t0 = Instant::now();
    let p = baseline(60, Boundary::Periodic);
    let grid: Vec<f64> = (0..=200).map(|i| PI * i as f64 / 200.0).collect();
    let b = solve_bands(&p, &grid).unwrap();
    let (em, ep) = (b.e_minus_k0.unwrap(), b.e_plus_k0.unwrap());
    let (xm, xp) = (-(4.2f64.powi(2) + 8.0).sqrt(), -(3.8f64.powi(2) + 8.0).sqrt());
    let secs = t0.elapsed().as_secs_f64();
    vec![
        check("E_-(pi/2)", (em - xm).abs() < 1e-8, format!("{em:.12} vs {xm:.12}")),
        check("E_+(pi/2)", (ep - xp).abs() < 1e-8, format!("{ep:.12} vs {xp:.12}")),
        check("runtime < 1 s", secs < 1.0, format!("{secs:.3} s")),
    ]
}

fn c2() -> Vec<Check> {
    let t0 = Instant::now();
    let p = baseline(60, Boundary::Periodic);
    let s = classify_doublons(two_excitation_spectrum(&p, HowMany::All, false).unwrap(), DEFAULT_BUNCHING_THRESHOLD);
    let gaps: Vec<(f64, f64)> = s
        .doublons()
        .map(|i| {
            let k = s.momentum[i].unwrap();
            let gap = [Branch::Lower, Branch::Upper]
                .iter()
                .filter_map(|&b| branch_energy(k, b, &p))
                .map(|e| (e - s.eigenvalues[i]).abs())
                .fold(f64::INFINITY, f64::min);
            (k, gap)
        })
        .collect();
    let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    let mut off: Vec<String> = gaps.iter().filter(|g| g.1 >= 1e-4).map(|(k, g)| format!("K={k:.4} by {g:.2e}")).collect();
    off.dedup();
    let count = gaps.len();
    let secs = t0.elapsed().as_secs_f64();
    vec![
        check(
            "doublon eigenvalues on band roots",
            worst < 1e-4 && count > 0,
            format!("{count} doublons, worst {worst:.2e}, off: [{}]", off.join(", ")),
        ),
        check("runtime < 1 min", secs < 60.0, format!("{secs:.2} s")),
    ]
}

fn c3() -> Vec<Check> {
    let t0 = Instant::now();
    let (u_m, n) = (0.2, 60);
    let mut worst = f64::NEG_INFINITY;
    let mut fewest = usize::MAX;
    for i in 0..=32 {
        let u_c = 0.25 * i as f64;
        if u_c <= 4.0 + u_m {
            continue;
        }
        let p = WaveguideParams::new(1.0, u_c, u_m, n, Boundary::Periodic).unwrap();
        let s = two_excitation_spectrum(&p, HowMany::All, false).unwrap();
        // bunching alone decides here; the energy cut of the classifier would make this circular
        let bunched: Vec<f64> =
            s.eigenvalues.iter().zip(&s.bunching).filter(|(_, &b)| b >= DEFAULT_BUNCHING_THRESHOLD).map(|(&e, _)| e).collect();
        fewest = fewest.min(bunched.len());
        worst = bunched.iter().copied().fold(worst, f64::max);
    }
    let secs = t0.elapsed().as_secs_f64();
    vec![
        check("bunched states below -4J for U_c > 4J + U_m", worst < -4.0 && fewest >= n / 2, format!("highest {worst:.5}, fewest {fewest} per U_c")),
        check("runtime < 5 min", secs < 300.0, format!("{secs:.1} s")),
    ]
}

fn c4(a: &DynamicsAnalysis) -> Vec<Check> {
    let (mean, spread) = a.plateau;
    let drift = a.result.diagnostics.max_norm_drift;
    vec![
        check("plateau within +-0.02", spread <= 0.04, format!("mean {mean:.4}, full spread {spread:.4}")),
        check("P2 > 5 P1", a.p2_tail > 5.0 * a.p1_tail, format!("P2/P1 = {:.3}", a.p2_tail / a.p1_tail)),
        check("norm drift < 1e-8", drift < 1e-8, format!("{drift:.2e}")),
    ]
}

fn c5(a: &DynamicsAnalysis, delta_ii: f64) -> Vec<Check> {
    let l1 = a.spbs.length().unwrap_or(f64::NAN);
    let l2 = a.dbs.profile.length().unwrap_or(f64::NAN);
    let target = (a.alpha / delta_ii).sqrt();
    let r1 = (l1 - a.spbs_length_closed).abs() / a.spbs_length_closed;
    let r2 = (l2 - target).abs() / target;
    vec![
        check("SPBS length within 10%", r1 <= 0.10, format!("{l1:.4} vs {:.4} ({:.1}%)", a.spbs_length_closed, 100.0 * r1)),
        check("DBS length within 15%", r2 <= 0.15, format!("{l2:.4} vs {target:.4} ({:.1}%)", 100.0 * r2)),
    ]
}

fn c6(a: &DynamicsAnalysis) -> Vec<Check> {
    let ratio = a.g2.as_ref().and_then(|g| Some(g.at(3)? / g.at(0)?)).unwrap_or(f64::NAN);
    vec![check("G2(3)/G2(0) < e^-2", ratio < (-2.0f64).exp(), format!("{ratio:.3e} vs {:.3e}", (-2.0f64).exp()))]
}

fn c7(a: &DynamicsAnalysis) -> Vec<Check> {
    let d = (a.residue.plateau - a.plateau.0).abs();
    vec![check("|Res|^2 vs plateau within 0.05", d <= 0.05, format!("{:.4} vs {:.4}", a.residue.plateau, a.plateau.0))]
}

fn c8(a: &DynamicsAnalysis) -> Vec<Check> {
    vec![check("max | |c_e|_red - |c_e|_full | <= 0.05", a.reduced_deviation <= 0.05, format!("{:.4}", a.reduced_deviation))]
}

struct FourBody {
    p: WaveguideParams,
    omega: f64,
    ring: DoublonRing,
    cfg: RunConfig,
}

impl FourBody {
    fn new() -> Self {
        let mut cfg = RunConfig::new(Experiment::FourBody);
        cfg.n = Some(N_FOURBODY);
        cfg.validate().unwrap();
        let p = cfg.params().unwrap();
        let omega = doublon::dynamics::omega_for_delta(&p, cfg.g, cfg.delta_ii, cfg.convention).unwrap();
        let ring = DoublonRing::new(&p).unwrap();
        Self { p, omega, ring, cfg }
    }

    fn run(&self, d_q: f64, d2: usize, shifts: (f64, f64), t_max: Option<f64>) -> FourBodyRun {
        let mut pairs = two_pair_layout(&self.p, self.omega, self.cfg.g, d_q, 0, d2).unwrap();
        pairs[1].first.omega += shifts.0;
        pairs[1].second.omega += shifts.1;
        let mut s = FourBodySettings::from_config(&self.cfg);
        if let Some(t) = t_max {
            s.t_max = t;
        }
        run_fourbody(&self.ring, &self.p, pairs, &s).unwrap()
    }
}

fn c9(fb: &FourBody, matched: &FourBodyRun) -> Vec<Check> {
    let m = &matched.point;
    let flags = m.compact_pairs == Some(true) && m.doublon_range == Some(true);
    let (a_rs, a_mu) = (m.a_rs.unwrap(), m.a_mu.unwrap());
    let window = m.t_end.unwrap();
    let split = fb.run(4.0, 4, (0.0, 0.0), Some(window));
    let s = &split.point;
    vec![
        check("flags true: A_RS >= 0.95", flags && a_rs >= 0.95, format!("A_RS {a_rs:.4}, flags {flags}")),
        check("flags true: A_mu <= 0.05", flags && a_mu <= 0.05, format!("A_mu {a_mu:.2e}")),
        check("d2 = 4: A_RS <= 0.05", s.a_rs.unwrap() <= 0.05, format!("A_RS {:.2e} over t <= {window}", s.a_rs.unwrap())),
    ]
}

fn c10(runs: &[FourBodyRun]) -> Vec<Check> {
    let (d, lnj): (Vec<f64>, Vec<f64>) =
        runs.iter().filter_map(|r| Some((r.point.d_q, r.point.j_rs_fit?.ln()))).unzip();
    let m = &runs[0].model;
    let target = -1.0 / (m.alpha / m.delta).sqrt();
    let fit = if d.len() == runs.len() { linear(&d, &lnj).ok() } else { None };
    let (slope, r2) = fit.map(|l| (l.slope, l.r_squared)).unwrap_or((f64::NAN, f64::NAN));
    let rel = (slope - target).abs() / target.abs();
    let mu = runs.iter().filter(|r| r.point.d_q > 4.0).map(|r| r.point.a_mu.unwrap()).fold(0.0, f64::max);
    vec![
        check(
            "ln J_RS_fit slope within 20% of -1/L_II",
            rel <= 0.2,
            format!("{slope:.4} vs {target:.4} ({:.1}%), r^2 {r2:.4}, {} of {} fits", 100.0 * rel, d.len(), runs.len()),
        ),
        check("A_mu < 1e-2 for D_q > 4", mu < 1e-2, format!("max {mu:.2e}")),
    ]
}

fn c11(fb: &FourBody, matched: &FourBodyRun) -> Vec<Check> {
    let j = matched.model.j_rs.norm();
    let a0 = matched.point.a_rs.unwrap();
    let a = |x: f64, y: f64| fb.run(4.0, 0, (x * j, y * j), None).point.a_rs.unwrap();
    let line: Vec<(f64, f64)> = [-0.5, -0.25, 0.25, 0.5].iter().map(|&x| (x, a(x, -x))).collect();
    let worst = line.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
    let (off1, off2) = (a(1.0, 1.0), a(2.0, 2.0));
    vec![
        check(
            "A_RS(d, -d) >= 0.9 A_RS(0, 0) for |d| <= 0.5 |J_RS|",
            worst >= 0.9 * a0,
            format!("min {worst:.4} vs 0.9 x {a0:.4}"),
        ),
        check(
            "A_RS decays off the line",
            off1 < a0 && off2 < off1 && off2 <= 0.5 * a0,
            format!("A(0,0) {a0:.4}, A(1,1) {off1:.4}, A(2,2) {off2:.4} in |J_RS| = {j:.3e}"),
        ),
    ]
}

fn c12() -> Vec<Check> {
    let p = baseline(10, Boundary::Open);
    let e = EmitterSet::new(vec![Emitter { omega: -2.51, g: 0.3, site: 4 }, Emitter { omega: -2.4, g: 0.2, site: 6 }]);
    let b = DoubleExcitationBasis::new(2, p.n);
    let mut amp = vec![Complex64::new(0.0, 0.0); b.dim()];
    amp[b.index(Label::Pair(0, 1)).unwrap()] = Complex64::new(0.6, 0.0);
    amp[b.index(Label::Photons(3, 3)).unwrap()] = Complex64::new(0.0, 0.8);
    let mut cfg = EvolveConfig::new(10.0, 1.0);
    cfg.projection = None;
    let res = evolve(&p, &e, &StateVector::new(&b, amp.clone()).unwrap(), &cfg).unwrap();
    let exact = dense_propagate(&p, &e, &amp, 10.0);
    let gap = res.final_state.amplitudes.iter().zip(&exact).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);

    let gp = baseline(60, Boundary::Periodic);
    let mut draws = Draws::new(20240917);
    let (mut done, mut worst) = (0, 0.0f64);
    while done < 100 {
        let k = PI * draws.next();
        let ch = if draws.next() < 0.5 { Channel::Cos } else { Channel::Sin };
        let c = ch.coefficient(k, gp.j);
        let e = (c.abs() + 0.2 + 5.8 * draws.next()) * if draws.next() < 0.5 { 1.0 } else { -1.0 };
        let r = (13.0 * draws.next()) as i64 - 6;
        let closed = green_f(k, e, r, ch, &gp).unwrap();
        // same resolvable range as the property test
        if closed.abs() <= 1e-6 * green_f(k, e, 0, ch, &gp).unwrap().abs() {
            continue;
        }
        let quad = integrate(|q| (q * r as f64).cos() / (e + c * q.cos()), -PI, PI, 1e-15);
        worst = worst.max((closed - quad).abs() / closed.abs());
        done += 1;
    }
    vec![
        check("evolve vs dense exponential (N=10, t=10) to 1e-8", gap < 1e-8, format!("{gap:.2e}")),
        check("Green closed form vs quadrature, 100 points, 1e-9 rel", worst < 1e-9, format!("worst {worst:.2e}")),
    ]
}

fn report(id: u32, checks: &[Check], secs: f64) -> bool {
    let pass = checks.iter().all(|c| c.pass);
    let known = !pass && checks.iter().filter(|c| !c.pass).all(|c| KNOWN_RED.contains(&(id, c.name)));
    let body: Vec<String> = checks.iter().map(|c| format!("[{}] {}: {}", if c.pass { "ok" } else { "red" }, c.name, c.detail)).collect();
    let verdict = if pass { "PASS" } else if known { "FAIL (known, see README)" } else { "FAIL" };
    println!("criterion {id:>2} {verdict}  {}  ({secs:.1} s)", body.join("; "));
    pass || known
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut ok = true;
    let mut timed = |id: u32, f: &mut dyn FnMut() -> Vec<Check>| {
        let t0 = Instant::now();
        let checks = f();
        ok &= report(id, &checks, t0.elapsed().as_secs_f64());
    };
    timed(1, &mut c1);
    timed(2, &mut c2);
    timed(3, &mut c3);

    let t0 = Instant::now();
    let cfg = RunConfig::new(Experiment::Dynamics);
    let dyn_run = analyse_dynamics(&cfg).unwrap();
    let shared = t0.elapsed().as_secs_f64();
    println!("  (N = {} dynamics to t = {} shared by criteria 4-8: {shared:.1} s)", cfg.sites(), cfg.t_end);
    timed(4, &mut || c4(&dyn_run));
    timed(5, &mut || c5(&dyn_run, cfg.delta_ii));
    timed(6, &mut || c6(&dyn_run));
    timed(7, &mut || c7(&dyn_run));
    timed(8, &mut || c8(&dyn_run));

    let fb = FourBody::new();
    let t0 = Instant::now();
    let runs: Vec<FourBodyRun> = (4..=14).step_by(2).map(|d| fb.run(d as f64, 0, (0.0, 0.0), None)).collect();
    println!("  (N = {N_FOURBODY} four-body runs at D_q = 4..14 shared by criteria 9-11: {:.1} s)", t0.elapsed().as_secs_f64());
    let matched = &runs[0];
    timed(9, &mut || c9(&fb, matched));
    timed(10, &mut || c10(&runs));
    timed(11, &mut || c11(&fb, matched));
    timed(12, &mut c12);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
