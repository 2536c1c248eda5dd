//! One function per subcommand: compute, then hand tables and plots to
//! [`emit_outputs`].

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{Experiment, RunConfig};
use super::fourbody::{run_detuning_sweep, run_dq_sweep, run_fourbody_config, timed, FourBodyPoint, SweepResult};
use super::output::{emit_outputs, fmt_f64, fmt_opt, svg_heatmap, svg_lines, Metadata, Series, Style, Table};
use crate::dynamics::{
    centre_plus_site, emitter_pair, evolve, extract_dbs_field, extract_g2, extract_spbs_profile, omega_for_delta,
    BoundStateProfile, CorrelationFunction, DbsField, DynamicsResult, EvolveConfig, StateVector,
};
use crate::error::{Error, Result};
use crate::model::{DoubleExcitationBasis, Label};
use crate::reduced::{
    coupling_g, dbs_closed_form, pair_delta, reduced_ode_evolve, self_energy_and_residue, spbs_closed_form, DoublonRing,
    EmitterPair, ReducedTrace, ResidueResult,
};
use crate::spectrum::{classify_doublons, two_excitation_spectrum, StateClass};
use crate::theory::{default_k_grid, fit_alpha, solve_bands, BandStructure, DEFAULT_ALPHA_SAMPLES, DEFAULT_ALPHA_WINDOW};

/// Fraction of the run treated as long-time.
pub const TAIL_FRACTION: f64 = 0.2;

pub fn run_bands(cfg: &RunConfig) -> Result<(BandStructure, Vec<PathBuf>)> {
    let (bands, wall) = timed(|| solve_bands(&cfg.params()?, &default_k_grid(cfg.k_count)));
    let bands = bands?;
    let mut t = Table::new(&["k", "e_minus", "e_plus", "lc_minus", "lc_plus"]);
    for i in 0..bands.k.len() {
        t.push(vec![
            fmt_f64(bands.k[i]),
            fmt_opt(bands.e_minus[i]),
            fmt_opt(bands.e_plus[i]),
            fmt_opt(bands.lc_minus[i]),
            fmt_opt(bands.lc_plus[i]),
        ]);
    }
    let nan = |v: &[Option<f64>]| v.iter().map(|x| x.unwrap_or(f64::NAN)).collect::<Vec<_>>();
    let (em, ep) = (nan(&bands.e_minus), nan(&bands.e_plus));
    let plot = svg_lines(
        "Doublon bands",
        "K",
        "E",
        &[
            Series { label: "E_-", x: &bands.k, y: &em, style: Style::Line },
            Series { label: "E_+", x: &bands.k, y: &ep, style: Style::Line },
        ],
        false,
    );
    let diag = json!({
        "e_minus_k0": bands.e_minus_k0,
        "e_plus_k0": bands.e_plus_k0,
        "gap_k0": bands.gap_at_k0(),
        "alpha": bands.alpha(),
    });
    let files = emit_outputs(cfg, "bands", &[("table", t)], &[("bands", plot)], Metadata::new(cfg, wall, diag))?;
    Ok((bands, files))
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (s, wall) = timed(|| two_excitation_spectrum(&cfg.params()?, cfg.how, false));
    let s = classify_doublons(s?, cfg.bunching_threshold);
    let mut t = Table::new(&["index", "energy", "bunching", "momentum", "class"]);
    for i in 0..s.len() {
        let class = match s.class[i] {
            Some(StateClass::Doublon) => "doublon",
            Some(StateClass::Scattering) => "scattering",
            None => "",
        };
        t.push(vec![i.to_string(), fmt_f64(s.eigenvalues[i]), fmt_f64(s.bunching[i]), fmt_opt(s.momentum[i]), class.into()]);
    }
    let (dk, de): (Vec<f64>, Vec<f64>) = s.doublons().filter_map(|i| Some((s.momentum[i]?, s.eigenvalues[i]))).unzip();
    let (sk, se): (Vec<f64>, Vec<f64>) =
        (0..s.len()).filter(|&i| s.class[i] == Some(StateClass::Scattering)).filter_map(|i| Some((s.momentum[i]?, s.eigenvalues[i]))).unzip();
    let plot = svg_lines(
        "Two-photon spectrum",
        "K",
        "E",
        &[
            Series { label: "scattering", x: &sk, y: &se, style: Style::Points },
            Series { label: "doublon", x: &dk, y: &de, style: Style::Points },
        ],
        false,
    );
    let diag = json!({ "states": s.len(), "doublons": s.doublons().count(), "max_residual": s.max_residual });
    emit_outputs(cfg, "spectrum", &[("eigenvalues", t)], &[("spectrum", plot)], Metadata::new(cfg, wall, diag))
}

/// Long run of one collocated pair and everything read off it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsAnalysis {
    pub result: DynamicsResult,
    pub omega: f64,
    pub pair: EmitterPair,
    /// Mean and spread of `|c_e|^2` over the last [`TAIL_FRACTION`].
    pub plateau: (f64, f64),
    pub p1_tail: f64,
    pub p2_tail: f64,
    pub spbs: BoundStateProfile,
    pub spbs_length_closed: f64,
    pub dbs: DbsField,
    pub dbs_length_closed: f64,
    pub dbs_overlap: Option<f64>,
    pub g2: Option<CorrelationFunction>,
    pub alpha: f64,
    pub delta: f64,
    pub residue: ResidueResult,
    pub reduced: ReducedTrace,
    /// `max_t | |c_e|_reduced - |c_e|_full |`.
    pub reduced_deviation: f64,
}

pub fn analyse_dynamics(cfg: &RunConfig) -> Result<DynamicsAnalysis> {
    let p = cfg.params()?;
    let omega = omega_for_delta(&p, cfg.g, cfg.delta_ii, cfg.convention)?;
    let c = centre_plus_site(&p);
    let sites = [c, c + cfg.d1];
    let e = emitter_pair(omega, cfg.g, sites);
    let pair = EmitterPair::new(e.emitters[0], e.emitters[1]);
    let b = DoubleExcitationBasis::new(2, p.n);
    let psi0 = StateVector::basis_state(&b, Label::Pair(0, 1))?;
    let mut ecfg = EvolveConfig::new(cfg.t_end, cfg.dt_store);
    ecfg.integrator = cfg.integrator;
    let result = evolve(&p, &e, &psi0, &ecfg)?;

    let pop = result.pair_population(0);
    let plateau = result.tail_stats(&pop, TAIL_FRACTION);
    let p1_tail = result.tail_stats(&result.p1, TAIL_FRACTION).0;
    let p2_tail = result.tail_stats(&result.p2, TAIL_FRACTION).0;
    let spbs = extract_spbs_profile(&result, 0, cfg.spbs_window)?;
    let spbs_length_closed = spbs_closed_form(omega, cfg.g, c, &p)?.length;
    let dbs = extract_dbs_field(&result, cfg.dbs_window)?;
    let g2 = extract_g2(&result, cfg.g2_rmax).ok();

    let ring = DoublonRing::new(&p)?;
    let alpha = fit_alpha(&p, DEFAULT_ALPHA_WINDOW, DEFAULT_ALPHA_SAMPLES)?.alpha;
    let delta = pair_delta(&pair, &ring)?;
    let coupling = coupling_g(&ring, &pair)?;
    let residue = self_energy_and_residue(coupling.at_k0().norm(), alpha, delta)?;
    let closed = dbs_closed_form(&p, pair.centre(), coupling.at_k0(), alpha, delta)?;
    let dbs_overlap = closed.overlap(result.long_time_state(), &b).ok();

    let reduced = reduced_ode_evolve(&ring, &[pair], 0, cfg.t_end, cfg.dt_store)?;
    let reduced_deviation = reduced
        .population(0)
        .iter()
        .zip(&pop)
        .map(|(r, f)| (r.sqrt() - f.sqrt()).abs())
        .fold(0.0, f64::max);
    Ok(DynamicsAnalysis {
        omega,
        pair,
        plateau,
        p1_tail,
        p2_tail,
        spbs,
        spbs_length_closed,
        dbs,
        dbs_length_closed: closed.length,
        dbs_overlap,
        g2,
        alpha,
        delta,
        residue,
        reduced,
        reduced_deviation,
        result,
    })
}

pub fn run_dynamics(cfg: &RunConfig) -> Result<(DynamicsAnalysis, Vec<PathBuf>)> {
    let (a, wall) = timed(|| analyse_dynamics(cfg));
    let a = a?;
    let r = &a.result;
    let pop = r.pair_population(0);
    let red = a.reduced.population(0);
    let traces = Table::from_columns(
        &["t", "pair_population", "p1", "p2", "norm", "energy", "reduced_pair_population"],
        &[&r.times, &pop, &r.p1, &r.p2, &r.norm, &r.energy, &red],
    );
    let n = r.params.n;
    let b = r.basis();
    let state = r.long_time_state();
    let diag_mod: Vec<f64> = state.diagonal(&b).iter().map(|z| z.norm()).collect();
    let sites: Vec<f64> = (0..n).map(|s| s as f64).collect();
    let profiles = Table::from_columns(&["site", "spbs_modulus", "dbs_diagonal_modulus"], &[&sites, &a.spbs.modulus, &diag_mod]);
    let mut tables = vec![("traces", traces), ("profiles", profiles)];
    if let Some(g2) = &a.g2 {
        let mut t = Table::new(&["r", "g2"]);
        for (r, v) in g2.r.iter().zip(&g2.values) {
            t.push(vec![r.to_string(), fmt_f64(*v)]);
        }
        tables.push(("g2", t));
    }
    if cfg.snapshot {
        let mut t = Table::new(&["m", "n", "value"]);
        for (k, v) in a.dbs.joint_density.iter().enumerate() {
            t.push(vec![(k / n).to_string(), (k % n).to_string(), fmt_f64(*v)]);
        }
        tables.push(("snapshot", t));
    }
    let plot_traces = svg_lines(
        "Pair population and photon sectors",
        "t",
        "population",
        &[
            Series { label: "|c_e|^2 full", x: &r.times, y: &pop, style: Style::Line },
            Series { label: "|c_e|^2 reduced", x: &r.times, y: &red, style: Style::Line },
            Series { label: "P1", x: &r.times, y: &r.p1, style: Style::Line },
            Series { label: "P2", x: &r.times, y: &r.p2, style: Style::Line },
        ],
        false,
    );
    let centre = a.pair.centre().round() as usize;
    let half = 40.min(n / 2);
    let lo = centre.saturating_sub(half);
    let hi = (centre + half).min(n - 1);
    let axis: Vec<f64> = (lo..=hi).map(|s| s as f64).collect();
    let crop: Vec<f64> = (lo..=hi).flat_map(|m| (lo..=hi).map(move |k| (m, k))).map(|(m, k)| a.dbs.joint_density[m * n + k]).collect();
    let plot_field = svg_heatmap("Long-time two-photon density", "n", "m", &axis, &axis, &crop);
    let diag = json!({
        "omega": a.omega,
        "pair_sites": [a.pair.first.site, a.pair.second.site],
        "plateau_mean": a.plateau.0,
        "plateau_spread": a.plateau.1,
        "p1_tail": a.p1_tail,
        "p2_tail": a.p2_tail,
        "stationary_energy": r.stationary.as_ref().map(|s| s.energy),
        "spbs_length_fit": a.spbs.length(),
        "spbs_length_closed": a.spbs_length_closed,
        "dbs_length_fit": a.dbs.profile.length(),
        "dbs_length_closed": a.dbs_length_closed,
        "dbs_overlap": a.dbs_overlap,
        "g2_ratio_3_0": a.g2.as_ref().and_then(|g| Some(g.at(3)? / g.at(0)?)),
        "alpha": a.alpha,
        "delta": a.delta,
        "residue_plateau": a.residue.plateau,
        "reduced_deviation": a.reduced_deviation,
        "integrator": r.diagnostics.integrator,
        "matvecs": r.diagnostics.matvecs,
        "max_norm_drift": r.diagnostics.max_norm_drift,
        "max_energy_drift": r.diagnostics.max_energy_drift,
        "warnings": r.diagnostics.warnings,
    });
    let files = emit_outputs(
        cfg,
        "dynamics",
        &tables,
        &[("traces", plot_traces), ("field", plot_field)],
        Metadata::new(cfg, wall, diag),
    )?;
    Ok((a, files))
}

pub fn run_fourbody_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (run, wall) = timed(|| run_fourbody_config(cfg));
    let run = run?;
    let traces = Table::from_columns(
        &["t", "c12", "c34", "p_mu", "reduced_c12", "reduced_c34", "eliminated_c12", "eliminated_c34"],
        &[
            &run.times,
            &run.c12,
            &run.c34,
            &run.p_mu,
            &run.reduced.population(0),
            &run.reduced.population(1),
            &run.eliminated.population(0),
            &run.eliminated.population(1),
        ],
    );
    let mut couplings = Table::new(&["k", "re_g1", "im_g1", "re_g2", "im_g2"]);
    let [g1, g2] = &run.model.couplings;
    for i in 0..g1.k.len() {
        couplings.push(vec![
            fmt_f64(g1.k[i]),
            fmt_f64(g1.values[i].re),
            fmt_f64(g1.values[i].im),
            fmt_f64(g2.values[i].re),
            fmt_f64(g2.values[i].im),
        ]);
    }
    let plot = svg_lines(
        "Four-body Rabi oscillation",
        "t",
        "population",
        &[
            Series { label: "|c_12|^2", x: &run.times, y: &run.c12, style: Style::Line },
            Series { label: "|c_34|^2", x: &run.times, y: &run.c34, style: Style::Line },
            Series { label: "P_mu", x: &run.times, y: &run.p_mu, style: Style::Line },
            Series { label: "|c_34|^2 reduced", x: &run.times, y: &run.reduced.population(1), style: Style::Line },
        ],
        false,
    );
    let m = &run.model;
    let diag = json!({
        "point": run.point,
        "stark": m.stark,
        "j_rs": [m.j_rs.re, m.j_rs.im],
        "j_rs_edge": [m.j_rs_edge.re, m.j_rs_edge.im],
        "d_q": m.d_q,
        "alpha": m.alpha,
        "delta": m.delta,
        "conditions": m.conditions,
        "warnings": run.warnings,
    });
    emit_outputs(cfg, "fourbody", &[("traces", traces), ("couplings", couplings)], &[("rabi", plot)], Metadata::new(cfg, wall, diag))
}

pub fn sweep_table(res: &SweepResult) -> Table {
    let mut t = Table::new(&[
        "d_q", "delta3", "delta4", "n1", "n2", "n3", "n4", "t_end", "a_rs", "a_mu", "t_swap", "j_rs_fit", "j_rs_reduced",
        "j_rs_edge", "stark1", "stark2", "compact_pairs", "doublon_range", "max_norm_drift", "note", "error",
    ]);
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    for p in &res.rows {
        let site = |i: usize| p.sites.map(|s| s[i].to_string()).unwrap_or_default();
        t.push(vec![
            fmt_f64(p.d_q),
            fmt_f64(p.delta3),
            fmt_f64(p.delta4),
            site(0),
            site(1),
            site(2),
            site(3),
            fmt_opt(p.t_end),
            fmt_opt(p.a_rs),
            fmt_opt(p.a_mu),
            fmt_opt(p.t_swap),
            fmt_opt(p.j_rs_fit),
            fmt_opt(p.j_rs_reduced),
            fmt_opt(p.j_rs_edge),
            fmt_opt(p.stark.map(|s| s[0])),
            fmt_opt(p.stark.map(|s| s[1])),
            flag(p.compact_pairs),
            flag(p.doublon_range),
            fmt_opt(p.max_norm_drift),
            p.note.clone().unwrap_or_default(),
            p.error.clone().unwrap_or_default(),
        ]);
    }
    t
}

fn sweep_diagnostics(res: &SweepResult) -> serde_json::Value {
    let failed = res.rows.iter().filter(|p| p.error.is_some()).count();
    let drift = res.rows.iter().filter_map(|p| p.max_norm_drift).fold(0.0, f64::max);
    json!({
        "schema_version": res.schema_version,
        "points": res.rows.len(),
        "failed_points": failed,
        "detuning_scale": res.detuning_scale,
        "max_norm_drift": drift,
    })
}

fn col(rows: &[FourBodyPoint], f: impl Fn(&FourBodyPoint) -> Option<f64>) -> Vec<f64> {
    rows.iter().map(|p| f(p).unwrap_or(f64::NAN)).collect()
}

pub fn run_sweep_cmd(cfg: &RunConfig) -> Result<(SweepResult, Vec<PathBuf>)> {
    let (res, wall) = timed(|| match cfg.experiment {
        Experiment::SweepDq => run_dq_sweep(cfg),
        Experiment::SweepDetuning => run_detuning_sweep(cfg),
        other => Err(Error::Config(format!("'{}' is not a sweep", other.name()))),
    });
    let res = res?;
    let rows = &res.rows;
    let plots = if cfg.experiment == Experiment::SweepDq {
        let x = col(rows, |p| Some(p.d_q));
        let (a_rs, a_mu) = (col(rows, |p| p.a_rs), col(rows, |p| p.a_mu));
        let (fit, red) = (col(rows, |p| p.j_rs_fit), col(rows, |p| p.j_rs_reduced));
        vec![
            (
                "amplitudes",
                svg_lines(
                    "Transfer amplitudes versus D_q",
                    "D_q",
                    "amplitude",
                    &[
                        Series { label: "A_RS", x: &x, y: &a_rs, style: Style::Points },
                        Series { label: "A_mu", x: &x, y: &a_mu, style: Style::Points },
                    ],
                    true,
                ),
            ),
            (
                "jrs",
                svg_lines(
                    "Four-body rate versus D_q",
                    "D_q",
                    "J_RS",
                    &[
                        Series { label: "fit from T_swap", x: &x, y: &fit, style: Style::Points },
                        Series { label: "reduced model", x: &x, y: &red, style: Style::Line },
                    ],
                    true,
                ),
            ),
        ]
    } else {
        let s = res.detuning_scale;
        let xs: Vec<f64> = cfg.delta4_axis.values().iter().map(|v| v * s).collect();
        let ys: Vec<f64> = cfg.delta3_axis.values().iter().map(|v| v * s).collect();
        let z = col(rows, |p| p.a_rs);
        vec![("a_rs", svg_heatmap("A_RS over the second-pair detunings", "delta_4", "delta_3", &xs, &ys, &z))]
    };
    let plots: Vec<(&str, String)> = plots.into_iter().collect();
    let files = emit_outputs(cfg, cfg.experiment.name(), &[("table", sweep_table(&res))], &plots, Metadata::new(cfg, wall, sweep_diagnostics(&res)))?;
    Ok((res, files))
}
