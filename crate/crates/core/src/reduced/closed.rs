//! Closed-form bound states and the residue of the pair amplitude.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{BoundStateProfile, StateVector, LengthFit};
use crate::error::{Error, Result};
use crate::model::{DoubleExcitationBasis, WaveguideParams};
use crate::theory::{Branch, DoublonWavefunction, K0};

/// `L_I^B = 1 / ln(2J / (|omega| - sqrt(omega^2 - 4J^2)))`.
pub fn spbs_length(omega: f64, j: f64) -> Result<f64> {
    let edge = 2.0 * j;
    if omega.abs() <= edge {
        return Err(Error::Resonance { omega, edge });
    }
    Ok(1.0 / (edge / (omega.abs() - (omega * omega - edge * edge).sqrt())).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpbsClosedForm {
    /// Photon amplitude at the emitter site per unit emitter amplitude.
    pub amplitude: f64,
    pub length: f64,
    pub profile: BoundStateProfile,
}

/// `psi(n) = A_s exp(-|n - n_i| / L_I^B)` with `A_s = g / sqrt(omega^2 - 4J^2)`.
pub fn spbs_closed_form(omega: f64, g: f64, site: usize, p: &WaveguideParams) -> Result<SpbsClosedForm> {
    let length = spbs_length(omega, p.j)?;
    let amplitude = g.abs() / (omega * omega - 4.0 * p.j * p.j).sqrt();
    let sites: Vec<f64> = (0..p.n).map(|s| s as f64).collect();
    let c = site as f64;
    let modulus = sites.iter().map(|x| amplitude * (-(x - c).abs() / length).exp()).collect();
    let fit = LengthFit { length, r_squared: 1.0, window: (0.0, (p.n - 1) as f64), points: p.n };
    Ok(SpbsClosedForm {
        amplitude,
        length,
        profile: BoundStateProfile { sites, modulus, centre: c, fit: Some(fit), reason: None },
    })
}

/// Pole and residue of `c_e(s) = 1 / (s + Sigma_e(s))` in the frame of the
/// dressed pair energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueResult {
    /// `s0 = -i eps`: the bound state sits `eps` above the pair energy.
    pub s0: Complex64,
    pub shift: f64,
    pub residue: Complex64,
    /// `|Res(s0)|^2`, the long-time pair population.
    pub plateau: f64,
    pub coupling_k0: f64,
    pub alpha: f64,
    pub delta: f64,
}

/// Continuum self-energy with the quadratic band edge,
/// `Sigma_e(s) = i |G_K0|^2 / (2 sqrt(alpha (i s + delta)))`.
///
/// Half the `N/2`-mode sum counts each `K` once, hence the 2.
pub fn sigma_e(s: Complex64, coupling_k0: f64, alpha: f64, delta: f64) -> Complex64 {
    let c = 0.5 * coupling_k0 * coupling_k0;
    let i = Complex64::new(0.0, 1.0);
    i * c / ((i * s + delta) * alpha).sqrt()
}

pub fn self_energy_and_residue(coupling_k0: f64, alpha: f64, delta: f64) -> Result<ResidueResult> {
    if !(delta > 0.0) {
        return Err(Error::Regime(format!(
            "pair detuning {delta} from the lower doublon band edge must be positive for a bound pole in the gap"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", "band curvature must be positive"));
    }
    let c = 0.5 * coupling_k0 * coupling_k0;
    // eps = c / sqrt(alpha (eps + delta)); the left side grows, the right falls
    let f = |eps: f64| eps - c / (alpha * (eps + delta)).sqrt();
    let (mut lo, mut hi) = (0.0, c / (alpha * delta).sqrt());
    if hi > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-17 * hi.max(1e-300) {
                break;
            }
        }
    }
    let eps = 0.5 * (lo + hi);
    let x = alpha * (eps + delta);
    let residue = 1.0 / (1.0 + alpha * c / (2.0 * x.powf(1.5)));
    Ok(ResidueResult {
        s0: Complex64::new(0.0, -eps),
        shift: eps,
        residue: Complex64::new(residue, 0.0),
        plateau: residue * residue,
        coupling_k0,
        alpha,
        delta,
    })
}

/// `Psi_d(m, n) ~ e^{iK0(x_c - x_m)} u_K0(x_c, r) exp(-|x_c - x_m| / L_II^B)`,
/// `L_II^B = sqrt(alpha / delta)`, normalized on the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbsClosedForm {
    pub length: f64,
    pub centre: f64,
    /// `A_d = G*_K0 / (psi0 sqrt(delta alpha))`.
    pub amplitude: Complex64,
    /// Normalization of the raw envelope times `u_K0` on this lattice.
    pub psi0: f64,
    pub sites: usize,
    values: Vec<Complex64>,
}

impl DbsClosedForm {
    /// Normalized first-quantized amplitude.
    pub fn psi(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.sites + n]
    }

    /// `|<Psi_d | psi_2>|` against the normalized two-photon block of `state`.
    pub fn overlap(&self, state: &StateVector, b: &DoubleExcitationBasis) -> Result<f64> {
        if b.sites() != self.sites {
            return Err(Error::DimensionMismatch { expected: self.sites, got: b.sites() });
        }
        let w = state.p2(b);
        if !(w > 0.0) {
            return Err(Error::InsufficientSignal("empty two-photon block".into()));
        }
        let n = self.sites;
        let s: Complex64 = (0..n * n).map(|k| self.values[k].conj() * state.psi(b, k / n, k % n)).sum();
        Ok(s.norm() / w.sqrt())
    }

    /// Centre-of-mass profile `|Psi_d(x_c, 0)|` along the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.sites).map(|n| self.psi(n, n).norm()).collect()
    }
}

pub fn dbs_closed_form(p: &WaveguideParams, centre: f64, coupling_k0: Complex64, alpha: f64, delta: f64) -> Result<DbsClosedForm> {
    if !(delta > 0.0 && alpha > 0.0) {
        return Err(Error::Regime(format!("DBS needs delta > 0 and alpha > 0 (delta = {delta}, alpha = {alpha})")));
    }
    let length = (alpha / delta).sqrt();
    let wf = DoublonWavefunction::new(K0, Branch::Lower, p)?;
    let n = p.n;
    let mut values: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (m, s) = ((k / n) as i64, (k % n) as i64);
            let xc = 0.5 * (m + s) as f64;
            let d = xc - centre;
            wf.bloch(m, s) * Complex64::from_polar((-d.abs() / length).exp(), -K0 * centre)
        })
        .collect();
    let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    values.iter_mut().for_each(|z| *z /= norm);
    let psi0 = 1.0 / norm;
    let amplitude = coupling_k0.conj() / (psi0 * (delta * alpha).sqrt());
    Ok(DbsClosedForm { length, centre, amplitude, psi0, sites: n, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spbs_values() {
        assert!((spbs_length(-2.5, 1.0).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-14);
        assert!(spbs_length(-2.0 - 1e-9, 1.0).unwrap() > 1e3);
        assert!(spbs_length(-2.6, 1.0).unwrap() < spbs_length(-2.5, 1.0).unwrap());
        assert!(spbs_length(1.9, 1.0).is_err());
    }

    #[test]
    fn residue_pole_solves_equation() {
        let r = self_energy_and_residue(0.029, 1.94, 0.03).unwrap();
        let res = r.s0 + sigma_e(r.s0, r.coupling_k0, r.alpha, r.delta);
        assert!(res.norm() < 1e-10);
        assert!(r.plateau > 0.9 && r.plateau < 1.0);
        let none = self_energy_and_residue(0.0, 1.94, 0.03).unwrap();
        assert_eq!(none.plateau, 1.0);
        assert_eq!(none.s0.im, 0.0);
        let closer = self_energy_and_residue(0.029, 1.94, 0.01).unwrap();
        assert!(closer.plateau < r.plateau);
        assert!(self_energy_and_residue(0.029, 1.94, -0.01).is_err());
    }
}
