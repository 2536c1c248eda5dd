use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::model::{build_full_hamiltonian, Boundary, CsrMatrix, DoubleExcitationBasis, EmitterSet, WaveguideParams};
use crate::propagate::{expectation, Integrator, Stepper};

pub const DEFAULT_DRIFT_TOL: f64 = 1e-8;

/// Where the bound-state energy is measured and where the field is averaged,
/// as fractions of `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionWindows {
    pub phase: (f64, f64),
    pub average: (f64, f64),
}

impl Default for ProjectionWindows {
    fn default() -> Self {
        Self { phase: (0.3, 0.6), average: (0.6, 1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub t_end: f64,
    pub dt_store: f64,
    pub integrator: Integrator,
    pub drift_tol: f64,
    pub projection: Option<ProjectionWindows>,
    /// Times at which the full state is kept (rounded to the store grid).
    pub snapshot_times: Vec<f64>,
}

impl EvolveConfig {
    pub fn new(t_end: f64, dt_store: f64) -> Self {
        Self {
            t_end,
            dt_store,
            integrator: Integrator::default(),
            drift_tol: DEFAULT_DRIFT_TOL,
            projection: Some(ProjectionWindows::default()),
            snapshot_times: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("t_end", "must be positive and finite"));
        }
        if !(self.dt_store > 0.0 && self.dt_store <= self.t_end) {
            return Err(Error::param("dt_store", "must lie in (0, t_end]"));
        }
        if !(self.drift_tol > 0.0) {
            return Err(Error::param("drift_tol", "must be positive"));
        }
        if let Some(w) = self.projection {
            let ok = |(a, b): (f64, f64)| 0.0 <= a && a < b && b <= 1.0;
            if !ok(w.phase) || !ok(w.average) {
                return Err(Error::param("projection", "windows must be increasing fractions of t_end"));
            }
        }
        Ok(())
    }
}

/// Time-averaged field `mean_t psi(t) e^{i E t}` over the averaging window.
///
/// Oscillating (radiating) parts average out, leaving the bound component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryField {
    pub energy: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub integrator: String,
    pub matvecs: u64,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    pub energy0: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsResult {
    pub params: WaveguideParams,
    pub emitters: EmitterSet,
    pub times: Vec<f64>,
    /// `c^e_{ij}(t)` for every emitter pair in basis order.
    pub pair_amplitudes: Vec<Vec<Complex64>>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    pub snapshots: Vec<StateVector>,
    pub final_state: StateVector,
    pub stationary: Option<StationaryField>,
    pub diagnostics: Diagnostics,
}

impl DynamicsResult {
    pub fn basis(&self) -> DoubleExcitationBasis {
        DoubleExcitationBasis::new(self.emitters.len(), self.params.n)
    }

    pub fn pair_population(&self, pair: usize) -> Vec<f64> {
        self.pair_amplitudes[pair].iter().map(|c| c.norm_sqr()).collect()
    }

    /// Mean and full spread (max - min) of a trace over the last `frac` of the run.
    pub fn tail_stats(&self, trace: &[f64], frac: f64) -> (f64, f64) {
        let t0 = self.times.last().copied().unwrap_or(0.0) * (1.0 - frac);
        let tail: Vec<f64> = self.times.iter().zip(trace).filter(|(t, _)| **t >= t0 - 1e-9).map(|(_, v)| *v).collect();
        let mean = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
        let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        (mean, hi - lo)
    }

    /// The stationary field when available, else the final snapshot.
    pub fn long_time_state(&self) -> &StateVector {
        self.stationary.as_ref().map(|s| &s.state).unwrap_or(&self.final_state)
    }
}

/// Nearest approach of any emitter to an open edge, in sites.
fn edge_clearance(p: &WaveguideParams, e: &EmitterSet) -> Option<usize> {
    (p.boundary == Boundary::Open).then(|| e.iter().map(|em| em.site.min(p.n - 1 - em.site)).min().unwrap_or(p.n / 2))
}

/// Slope of the unwrapped phase of `z(t)`; the sign is chosen so that
/// `z ~ e^{-i E t}` returns `E`, reduced to the alias nearest `reference`.
fn phase_energy(times: &[f64], z: &[Complex64], dt: f64, reference: f64) -> Option<f64> {
    if times.len() < 3 || z.iter().any(|c| c.norm() < 1e-12) {
        return None;
    }
    let mut phase = Vec::with_capacity(z.len());
    let mut acc = z[0].arg();
    phase.push(acc);
    for w in z.windows(2) {
        acc += (w[1] * w[0].conj()).arg();
        phase.push(acc);
    }
    let slope = crate::fit::linear(times, &phase).ok()?.slope;
    let e = -slope;
    let period = 2.0 * std::f64::consts::PI / dt;
    Some(e + ((reference - e) / period).round() * period)
}

/// Full Schrodinger evolution of `psi0` in the double-excitation sector.
pub fn evolve(p: &WaveguideParams, e: &EmitterSet, psi0: &StateVector, cfg: &EvolveConfig) -> Result<DynamicsResult> {
    cfg.validate()?;
    let b = DoubleExcitationBasis::new(e.len(), p.n);
    if psi0.amplitudes.len() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: psi0.amplitudes.len() });
    }
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::param("psi0", format!("initial state has norm {n0}")));
    }
    let h = build_full_hamiltonian(p, e, &b)?.to_csr();
    evolve_with(&h, p, e, &b, psi0, cfg)
}

pub(crate) fn evolve_with(
    h: &CsrMatrix,
    p: &WaveguideParams,
    e: &EmitterSet,
    b: &DoubleExcitationBasis,
    psi0: &StateVector,
    cfg: &EvolveConfig,
) -> Result<DynamicsResult> {
    let steps = (cfg.t_end / cfg.dt_store).round().max(1.0) as usize;
    let dt = cfg.t_end / steps as f64;
    let mut warnings = Vec::new();
    if let Some(clear) = edge_clearance(p, e) {
        let reach = 2.0 * p.j * cfg.t_end;
        if reach >= clear as f64 {
            warnings.push(format!(
                "reflection guard: single photons travel {reach:.1} sites by t_end but the nearest edge is {clear} sites away"
            ));
        }
    }

    let mut stepper = Stepper::new(h, dt, cfg.integrator, cfg.t_end, cfg.drift_tol);
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.dim()];
    let mut psi = psi0.amplitudes.clone();
    let energy0 = expectation(h, &psi, &mut scratch);

    let npairs = b.emitter_pairs().len();
    let mut out = DynamicsResult {
        params: *p,
        emitters: e.clone(),
        times: Vec::with_capacity(steps + 1),
        pair_amplitudes: vec![Vec::with_capacity(steps + 1); npairs],
        p1: Vec::with_capacity(steps + 1),
        p2: Vec::with_capacity(steps + 1),
        norm: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        snapshots: Vec::new(),
        final_state: psi0.clone(),
        stationary: None,
        diagnostics: Diagnostics {
            integrator: stepper.describe(),
            matvecs: 0,
            max_norm_drift: 0.0,
            max_energy_drift: 0.0,
            energy0,
            warnings: Vec::new(),
        },
    };
    let snap_steps: Vec<usize> = cfg.snapshot_times.iter().map(|t| ((t / dt).round().max(0.0) as usize).min(steps)).collect();

    // reference pair for the bound-state phase: the most populated at t = 0
    let reference = (0..npairs).max_by(|&a, &c| psi[a].norm_sqr().total_cmp(&psi[c].norm_sqr()));
    let windows = cfg.projection.filter(|_| reference.is_some());
    let mut bound_energy: Option<f64> = None;
    let mut projection: Option<(Vec<Complex64>, usize, f64)> = None;

    for k in 0..=steps {
        if k > 0 {
            stepper.step(&mut psi);
        }
        let t = k as f64 * dt;
        let state = StateVector { amplitudes: psi.clone(), time: t };
        let norm = state.norm();
        let en = expectation(h, &psi, &mut scratch);
        let drift = (norm - 1.0).abs();
        out.diagnostics.max_norm_drift = out.diagnostics.max_norm_drift.max(drift);
        out.diagnostics.max_energy_drift = out.diagnostics.max_energy_drift.max((en - energy0).abs());
        if drift > cfg.drift_tol {
            return Err(Error::NormDrift { drift, tol: cfg.drift_tol, time: t });
        }
        out.times.push(t);
        for (pi, tr) in out.pair_amplitudes.iter_mut().enumerate() {
            tr.push(psi[pi]);
        }
        out.p1.push(state.p1(b));
        out.p2.push(state.p2(b));
        out.norm.push(norm);
        out.energy.push(en);
        if snap_steps.contains(&k) {
            out.snapshots.push(state);
        }

        if let (Some(w), Some(r)) = (windows, reference) {
            let frac = t / cfg.t_end;
            if bound_energy.is_none() && frac >= w.phase.1 - 1e-12 {
                let sel: Vec<usize> =
                    (0..out.times.len()).filter(|&i| out.times[i] >= w.phase.0 * cfg.t_end - 1e-9).collect();
                let ts: Vec<f64> = sel.iter().map(|&i| out.times[i]).collect();
                let zs: Vec<Complex64> = sel.iter().map(|&i| out.pair_amplitudes[r][i]).collect();
                let bare = h.row(r).find(|&(c, _)| c == r).map(|(_, v)| v).unwrap_or(0.0);
                bound_energy = phase_energy(&ts, &zs, dt, bare);
                if bound_energy.is_none() {
                    warnings.push("stationary projection skipped: reference pair amplitude vanished".into());
                }
            }
            if let Some(eb) = bound_energy {
                if frac >= w.average.0 - 1e-12 && frac <= w.average.1 + 1e-12 {
                    let (acc, count, _) =
                        projection.get_or_insert_with(|| (vec![Complex64::new(0.0, 0.0); psi.len()], 0, t));
                    let ph = Complex64::from_polar(1.0, eb * t);
                    for (a, z) in acc.iter_mut().zip(&psi) {
                        *a += z * ph;
                    }
                    *count += 1;
                }
            }
        }
    }

    out.diagnostics.matvecs = stepper.matvecs;
    out.final_state = StateVector { amplitudes: psi, time: cfg.t_end };
    if let (Some(eb), Some((acc, count, t_first))) = (bound_energy, projection) {
        let inv = 1.0 / count as f64;
        out.stationary = Some(StationaryField {
            energy: eb,
            window: (t_first, cfg.t_end * windows.map(|w| w.average.1).unwrap_or(1.0)),
            samples: count,
            state: StateVector { amplitudes: acc.into_iter().map(|z| z * inv).collect(), time: cfg.t_end },
        });
    }
    out.diagnostics.warnings = warnings;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Emitter, Label};

    #[test]
    fn uncoupled_pair_stays_excited() {
        let p = WaveguideParams::new(1.0, 4.0, 0.2, 12, Boundary::Open).unwrap();
        let e = EmitterSet::new(vec![Emitter { omega: -2.5, g: 0.0, site: 6 }, Emitter { omega: -2.5, g: 0.0, site: 6 }]);
        let b = DoubleExcitationBasis::new(2, 12);
        let psi0 = StateVector::basis_state(&b, Label::Pair(0, 1)).unwrap();
        let res = evolve(&p, &e, &psi0, &EvolveConfig::new(20.0, 0.5)).unwrap();
        assert!(res.pair_population(0).iter().all(|&v| (v - 1.0).abs() < 1e-13));
        let st = res.stationary.unwrap();
        assert!((st.energy + 5.0).abs() < 1e-10);
        assert!((st.state.amplitudes[0].norm() - 1.0).abs() < 1e-10);
        assert!(!res.diagnostics.warnings.is_empty());
    }
}
