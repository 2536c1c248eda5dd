//! Pair amplitudes coupled to lower-band doublon modes, with single photons
//! adiabatically eliminated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coupling::{coupling_g, DoublonCoupling, DoublonRing};
use super::pair::EmitterPair;
use crate::error::{Error, Result};
use crate::propagate::{norm, DenseHermitian, HermitianOp, Integrator, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedTrace {
    pub times: Vec<f64>,
    /// One amplitude trace per pair.
    pub pairs: Vec<Vec<Complex64>>,
    /// Total doublon-mode weight at each stored time.
    pub doublon_weight: Vec<f64>,
    /// Mode amplitudes `c_K` at `t_end` (empty for the eliminated model).
    pub modes_final: Vec<Complex64>,
    pub max_norm_drift: f64,
}

impl ReducedTrace {
    pub fn population(&self, pair: usize) -> Vec<f64> {
        self.pairs[pair].iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Generator over `[pair_1 .. pair_P, K modes]`: pair energies on the
/// diagonal (Lamb shifted), `E_-(K)` for the modes, and `-G_K / sqrt N`
/// between them.
pub fn reduced_generator(ring: &DoublonRing, energies: &[f64], couplings: &[DoublonCoupling]) -> Result<DenseHermitian> {
    if energies.len() != couplings.len() {
        return Err(Error::DimensionMismatch { expected: energies.len(), got: couplings.len() });
    }
    let np = energies.len();
    let nk = ring.k.len();
    let scale = 1.0 / (ring.n_ring() as f64).sqrt();
    let mut h = DenseHermitian::zeros(np + nk);
    for (i, (&e, c)) in energies.iter().zip(couplings).enumerate() {
        if c.values.len() != nk {
            return Err(Error::DimensionMismatch { expected: nk, got: c.values.len() });
        }
        h.set(i, i, Complex64::new(e, 0.0));
        for (k, g) in c.values.iter().enumerate() {
            h.set_pair(i, np + k, -g * scale);
        }
    }
    for (k, &ek) in ring.energy.iter().enumerate() {
        h.set(np + k, np + k, Complex64::new(ek, 0.0));
    }
    Ok(h)
}

fn run(h: &DenseHermitian, npairs: usize, start: usize, t_end: f64, dt_store: f64, drift_tol: f64) -> Result<ReducedTrace> {
    if !(t_end > 0.0 && dt_store > 0.0) {
        return Err(Error::param("t_end", "times must be positive"));
    }
    let steps = (t_end / dt_store).round().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let mut psi = vec![Complex64::new(0.0, 0.0); h.dim()];
    psi[start] = Complex64::new(1.0, 0.0);
    let mut st = Stepper::new(h, dt, Integrator::default(), t_end, drift_tol);
    let mut out = ReducedTrace {
        times: Vec::with_capacity(steps + 1),
        pairs: vec![Vec::with_capacity(steps + 1); npairs],
        doublon_weight: Vec::with_capacity(steps + 1),
        modes_final: Vec::new(),
        max_norm_drift: 0.0,
    };
    for k in 0..=steps {
        if k > 0 {
            st.step(&mut psi);
        }
        let t = k as f64 * dt;
        let drift = (norm(&psi) - 1.0).abs();
        out.max_norm_drift = out.max_norm_drift.max(drift);
        if drift > drift_tol {
            return Err(Error::NormDrift { drift, tol: drift_tol, time: t });
        }
        out.times.push(t);
        for (i, tr) in out.pairs.iter_mut().enumerate() {
            tr.push(psi[i]);
        }
        out.doublon_weight.push(psi[npairs..].iter().map(|z| z.norm_sqr()).sum());
    }
    out.modes_final = psi[npairs..].to_vec();
    Ok(out)
}

/// Pairs coupled to the doublon modes, pair `start` initially excited.
pub fn reduced_ode_evolve(ring: &DoublonRing, pairs: &[EmitterPair], start: usize, t_end: f64, dt_store: f64) -> Result<ReducedTrace> {
    if start >= pairs.len() {
        return Err(Error::param("start", format!("pair {start} of {}", pairs.len())));
    }
    let j = ring.params.j;
    let energies = pairs.iter().map(|p| p.energy(j)).collect::<Result<Vec<_>>>()?;
    let couplings = pairs.iter().map(|p| coupling_g(ring, p)).collect::<Result<Vec<_>>>()?;
    let h = reduced_generator(ring, &energies, &couplings)?;
    run(&h, pairs.len(), start, t_end, dt_store, crate::dynamics::DEFAULT_DRIFT_TOL)
}

/// Two-level model after eliminating the doublons:
/// `[[E_1 + Delta_S1, J_RS], [J_RS*, E_2 + Delta_S2]]`.
pub fn eliminated_generator(energies: [f64; 2], stark: [f64; 2], j_rs: Complex64) -> DenseHermitian {
    let mut h = DenseHermitian::zeros(2);
    h.set(0, 0, Complex64::new(energies[0] + stark[0], 0.0));
    h.set(1, 1, Complex64::new(energies[1] + stark[1], 0.0));
    h.set_pair(0, 1, j_rs);
    h
}

pub fn eliminated_evolve(h: &DenseHermitian, t_end: f64, dt_store: f64) -> Result<ReducedTrace> {
    run(h, 2, 0, t_end, dt_store, crate::dynamics::DEFAULT_DRIFT_TOL)
}
