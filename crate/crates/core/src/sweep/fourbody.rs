//! Full-dynamics four-body Rabi runs and the sweeps built from them.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DetuningUnit, RunConfig};
use super::layout::two_pair_layout;
use crate::dynamics::{evolve, omega_for_delta, EvolveConfig, StateVector};
use crate::error::{Error, Result};
use crate::model::{DoubleExcitationBasis, Label, WaveguideParams};
use crate::propagate::Integrator;
use crate::reduced::{
    eliminated_evolve, eliminated_generator, four_body_model, reduced_ode_evolve, DoublonRing, EmitterPair,
    FourBodyModel, ReducedTrace,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Emitter pairs other than `(1,2)` and `(3,4)`: single-photon exchange paths.
const CROSS_PAIRS: [(usize, usize); 4] = [(0, 2), (0, 3), (1, 2), (1, 3)];

/// Observation window and integrator of one four-body run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourBodySettings {
    pub t_factor: f64,
    pub t_max: f64,
    pub dt_store: f64,
    pub integrator: Integrator,
}

impl FourBodySettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { t_factor: cfg.t_factor, t_max: cfg.t_max, dt_store: cfg.dt_store, integrator: cfg.integrator }
    }
}

/// Scalars read off one run. Fields are `None` when the point failed
/// (`error`) or, for `t_swap`, when no transfer maximum was found (`note`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourBodyPoint {
    pub d_q: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub sites: Option<[usize; 4]>,
    pub t_end: Option<f64>,
    /// `max_t |c_34|^2`.
    pub a_rs: Option<f64>,
    /// `max_t sum_{ij != 12,34} |c_ij|^2`.
    pub a_mu: Option<f64>,
    pub t_swap: Option<f64>,
    /// `pi / (2 T_swap)`.
    pub j_rs_fit: Option<f64>,
    pub j_rs_reduced: Option<f64>,
    pub j_rs_edge: Option<f64>,
    pub stark: Option<[f64; 2]>,
    pub compact_pairs: Option<bool>,
    pub doublon_range: Option<bool>,
    pub max_norm_drift: Option<f64>,
    pub matvecs: Option<u64>,
    pub note: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourBodyRun {
    pub point: FourBodyPoint,
    pub model: FourBodyModel,
    pub times: Vec<f64>,
    pub c12: Vec<f64>,
    pub c34: Vec<f64>,
    pub p_mu: Vec<f64>,
    /// Pairs coupled to the doublon modes.
    pub reduced: ReducedTrace,
    /// Two-level model after eliminating the doublons.
    pub eliminated: ReducedTrace,
    pub warnings: Vec<String>,
}

/// First population-transfer maximum of `trace`.
///
/// The trace is first averaged over a centred window of width `smooth`
/// (the beat with the band edge, `2 pi / delta`, rides on the Rabi curve).
/// The lobe opens where the smoothed trace first reaches half its maximum and
/// closes where it falls below a quarter; its peak is refined by
/// a parabola through its neighbours. `None` when that lobe is still open at
/// the last sample.
pub fn first_transfer_maximum(times: &[f64], trace: &[f64], smooth: f64) -> Option<f64> {
    if times.len() < 3 || times.len() != trace.len() {
        return None;
    }
    let dt = times[1] - times[0];
    let half = if smooth > 0.0 && dt > 0.0 { (0.5 * smooth / dt).round() as usize } else { 0 };
    let y: Vec<f64> = (0..trace.len())
        .map(|i| {
            let w = &trace[i.saturating_sub(half)..(i + half + 1).min(trace.len())];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect();
    let top = y.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return None;
    }
    let start = y.iter().position(|&v| v >= 0.5 * top)?;
    // hysteresis: the lobe closes only once the trace falls to a quarter
    let len = y[start..].iter().position(|&v| v < 0.25 * top)?;
    let i = (start..start + len).max_by(|&a, &b| y[a].total_cmp(&y[b]))?;
    if i == 0 || i + 1 >= y.len() {
        return None;
    }
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let curv = y0 - 2.0 * y1 + y2;
    let shift = if curv < 0.0 { 0.5 * (y0 - y2) / curv } else { 0.0 };
    Some(times[i] + shift.clamp(-0.5, 0.5) * dt)
}

/// Runs the full dynamics from `|ee, gg>` for `t_factor` reduced swap times.
pub fn run_fourbody(ring: &DoublonRing, p: &WaveguideParams, pairs: [EmitterPair; 2], s: &FourBodySettings) -> Result<FourBodyRun> {
    let model = four_body_model(ring, &pairs[0], &pairs[1])?;
    let t_est = model.swap_time();
    let t_end = if t_est.is_finite() { (s.t_factor * t_est).min(s.t_max) } else { s.t_max };
    let t_end = (t_end / s.dt_store).ceil().max(1.0) * s.dt_store;

    let emitters = EmitterPair::emitters(&pairs);
    let b = DoubleExcitationBasis::new(4, p.n);
    let psi0 = StateVector::basis_state(&b, Label::Pair(0, 1))?;
    let mut ecfg = EvolveConfig::new(t_end, s.dt_store);
    ecfg.projection = None;
    ecfg.integrator = s.integrator;
    let res = evolve(p, &emitters, &psi0, &ecfg)?;

    let pop = |i: usize, j: usize| -> Result<Vec<f64>> { Ok(res.pair_population(b.pair_index(i, j)?)) };
    let c12 = pop(0, 1)?;
    let c34 = pop(2, 3)?;
    let cross = CROSS_PAIRS.iter().map(|&(i, j)| pop(i, j)).collect::<Result<Vec<_>>>()?;
    let p_mu: Vec<f64> = (0..res.times.len()).map(|k| cross.iter().map(|c| c[k]).sum()).collect();
    let a_rs = c34.iter().copied().fold(0.0, f64::max);
    let a_mu = p_mu.iter().copied().fold(0.0, f64::max);
    let beat = if model.delta > 0.0 { 2.0 * std::f64::consts::PI / model.delta } else { 0.0 };
    let t_swap = first_transfer_maximum(&res.times, &c34, beat);
    let note = t_swap.is_none().then(|| format!("no completed transfer maximum of |c_34|^2 within t_end = {t_end}"));

    let reduced = reduced_ode_evolve(ring, &pairs, 0, t_end, s.dt_store)?;
    let eliminated = eliminated_evolve(&eliminated_generator(model.energies, model.stark, model.j_rs), t_end, s.dt_store)?;

    let point = FourBodyPoint {
        d_q: model.d_q,
        delta3: pairs[1].first.omega - pairs[0].first.omega,
        delta4: pairs[1].second.omega - pairs[0].second.omega,
        sites: Some([pairs[0].first.site, pairs[0].second.site, pairs[1].first.site, pairs[1].second.site]),
        t_end: Some(t_end),
        a_rs: Some(a_rs),
        a_mu: Some(a_mu),
        t_swap,
        j_rs_fit: t_swap.map(|t| std::f64::consts::FRAC_PI_2 / t),
        j_rs_reduced: Some(model.j_rs.norm()),
        j_rs_edge: Some(model.j_rs_edge.norm()),
        stark: Some(model.stark),
        compact_pairs: Some(model.conditions.compact_pairs),
        doublon_range: Some(model.conditions.doublon_range),
        max_norm_drift: Some(res.diagnostics.max_norm_drift),
        matvecs: Some(res.diagnostics.matvecs),
        note,
        error: None,
    };
    Ok(FourBodyRun {
        point,
        model,
        times: res.times,
        c12,
        c34,
        p_mu,
        reduced,
        eliminated,
        warnings: res.diagnostics.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub experiment: String,
    /// Scale applied to the detuning axes (`|J_RS|` at resonance, or 1).
    pub detuning_scale: f64,
    /// One row per sweep point, in axis order.
    pub rows: Vec<FourBodyPoint>,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn sweep_point(ring: &DoublonRing, p: &WaveguideParams, cfg: &RunConfig, omega: f64, d_q: f64, d3: f64, d4: f64) -> FourBodyPoint {
    let attempt = || -> Result<FourBodyPoint> {
        let mut pairs = two_pair_layout(p, omega, cfg.g, d_q, cfg.d1, cfg.d2)?;
        pairs[1].first.omega += d3;
        pairs[1].second.omega += d4;
        Ok(run_fourbody(ring, p, pairs, &FourBodySettings::from_config(cfg))?.point)
    };
    attempt().unwrap_or_else(|e| FourBodyPoint { d_q, delta3: d3, delta4: d4, error: Some(e.to_string()), ..Default::default() })
}

fn setup(cfg: &RunConfig) -> Result<(WaveguideParams, f64, DoublonRing)> {
    let p = cfg.params()?;
    let omega = omega_for_delta(&p, cfg.g, cfg.delta_ii, cfg.convention)?;
    let ring = DoublonRing::new(&p)?;
    Ok((p, omega, ring))
}

/// `A_RS`, `A_mu`, `J_RS` versus the pair distance `D_q`.
pub fn run_dq_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let (p, omega, ring) = setup(cfg)?;
    let axis = cfg.dq_axis.values();
    let rows = pool(cfg.threads)?.install(|| {
        axis.par_iter().map(|&d| sweep_point(&ring, &p, cfg, omega, d, 0.0, 0.0)).collect::<Vec<_>>()
    });
    Ok(SweepResult { schema_version: SCHEMA_VERSION, experiment: "sweep-dq".into(), detuning_scale: 1.0, rows })
}

/// `A_RS` over the detunings `(delta_3, delta_4)` of the second pair, rows
/// ordered with `delta_4` varying fastest.
pub fn run_detuning_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let (p, omega, ring) = setup(cfg)?;
    let scale = match cfg.detuning_unit {
        DetuningUnit::Absolute => 1.0,
        DetuningUnit::Jrs => {
            let [a, b] = two_pair_layout(&p, omega, cfg.g, cfg.d_q, cfg.d1, cfg.d2)?;
            four_body_model(&ring, &a, &b)?.j_rs.norm()
        }
    };
    let grid: Vec<(f64, f64)> = cfg
        .delta3_axis
        .values()
        .into_iter()
        .flat_map(|x| cfg.delta4_axis.values().into_iter().map(move |y| (x * scale, y * scale)))
        .collect();
    let rows = pool(cfg.threads)?.install(|| {
        grid.par_iter().map(|&(x, y)| sweep_point(&ring, &p, cfg, omega, cfg.d_q, x, y)).collect::<Vec<_>>()
    });
    Ok(SweepResult { schema_version: SCHEMA_VERSION, experiment: "sweep-detuning".into(), detuning_scale: scale, rows })
}

/// Single four-body run at `cfg.d_q`.
pub fn run_fourbody_config(cfg: &RunConfig) -> Result<FourBodyRun> {
    let (p, omega, ring) = setup(cfg)?;
    let pairs = two_pair_layout(&p, omega, cfg.g, cfg.d_q, cfg.d1, cfg.d2)?;
    run_fourbody(&ring, &p, pairs, &FourBodySettings::from_config(cfg))
}

/// Wall-clock seconds of `f`.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_maximum_refined() {
        let t: Vec<f64> = (0..400).map(|k| k as f64).collect();
        let y: Vec<f64> = t.iter().map(|x| (0.01 * x).sin().powi(2)).collect();
        let peak = first_transfer_maximum(&t, &y, 0.0).unwrap();
        assert!((peak - std::f64::consts::FRAC_PI_2 / 0.01).abs() < 0.05, "{peak}");
        // a fast ripple that dips below half the maximum is averaged away
        let rippled: Vec<f64> = t.iter().zip(&y).map(|(x, v)| v + 0.3 * (2.0 * std::f64::consts::PI * x / 10.0).sin()).collect();
        let smooth = first_transfer_maximum(&t, &rippled, 10.0).unwrap();
        assert!((smooth - 157.08).abs() < 2.0, "{smooth}");
        // still rising at the end: no maximum
        assert!(first_transfer_maximum(&t[..140], &y[..140], 0.0).is_none());
        assert!(first_transfer_maximum(&t, &[0.0; 400], 0.0).is_none());
    }
}
