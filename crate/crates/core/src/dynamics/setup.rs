//! Emitter placement and frequency selection for the pair experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Emitter, EmitterSet, WaveguideParams};
use crate::theory::band_edges_k0;

/// How the pair detuning `delta_II` from the lower doublon band edge is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DetuningConvention {
    /// `2 omega_q + Lambda(omega_q) = E_-(K0) + delta_II`: the detuning is
    /// measured from the pair energy including its single-photon Lamb shift.
    #[default]
    Dressed,
    /// `2 omega_q = E_-(K0) + delta_II`.
    Bare,
}

impl std::str::FromStr for DetuningConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dressed" => Ok(Self::Dressed),
            "bare" => Ok(Self::Bare),
            other => Err(Error::Config(format!("unknown detuning convention '{other}' (dressed|bare)"))),
        }
    }
}

/// Second-order shift `g^2 G(omega)` of one excited emitter outside the
/// single-photon band, `G(E) = sgn(E) / sqrt(E^2 - 4J^2)`.
pub fn lamb_shift(omega: f64, g: f64, j: f64) -> Result<f64> {
    let edge = 2.0 * j;
    if omega.abs() <= edge {
        return Err(Error::Resonance { omega, edge });
    }
    Ok(g * g * omega.signum() / (omega * omega - edge * edge).sqrt())
}

/// Shift of `|e_a e_b, vac>`: each emitter relaxes into the waveguide while
/// the other stays excited.
pub fn pair_lamb_shift(a: &Emitter, b: &Emitter, j: f64) -> Result<f64> {
    Ok(lamb_shift(a.omega, a.g, j)? + lamb_shift(b.omega, b.g, j)?)
}

/// Emitter frequency for two identical emitters at pair detuning `delta_ii`.
pub fn omega_for_delta(p: &WaveguideParams, g: f64, delta_ii: f64, convention: DetuningConvention) -> Result<f64> {
    let (e_minus, e_plus) = band_edges_k0(p);
    let target = e_minus + delta_ii;
    let bare = 0.5 * target;
    if bare.abs() <= 2.0 * p.j {
        return Err(Error::Resonance { omega: bare, edge: 2.0 * p.j });
    }
    if delta_ii >= e_plus - e_minus {
        return Err(Error::Regime(format!(
            "delta_II = {delta_ii} puts the pair above the upper doublon band edge {e_plus}"
        )));
    }
    match convention {
        DetuningConvention::Bare => Ok(bare),
        DetuningConvention::Dressed => {
            // contraction: |d Lambda / d omega| / 2 << 1 away from the band edge
            let mut w = bare;
            for _ in 0..200 {
                let next = 0.5 * (target - 2.0 * lamb_shift(w, g, p.j)?);
                if (next - w).abs() < 1e-15 * w.abs().max(1.0) {
                    return Ok(next);
                }
                w = next;
            }
            Err(Error::NoConvergence { residual: (2.0 * w + 2.0 * lamb_shift(w, g, p.j)? - target).abs(), iterations: 200 })
        }
    }
}

/// Site nearest the chain centre on the `U_c + |U_m|` sublattice.
pub fn centre_plus_site(p: &WaveguideParams) -> usize {
    let parity = p.plus_parity();
    let c = (p.n - 1) / 2;
    if c % 2 == parity {
        c
    } else if c + 1 < p.n {
        c + 1
    } else {
        c - 1
    }
}

/// Two identical emitters at `sites`.
pub fn emitter_pair(omega: f64, g: f64, sites: [usize; 2]) -> EmitterSet {
    EmitterSet::new(sites.iter().map(|&site| Emitter { omega, g, site }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    #[test]
    fn fig3_frequencies() {
        let p = WaveguideParams::new(1.0, 4.0, 0.2, 401, Boundary::Open).unwrap();
        let bare = omega_for_delta(&p, 0.1, 0.03, DetuningConvention::Bare).unwrap();
        assert!((bare - (-(4.2f64.powi(2) + 8.0).sqrt() + 0.03) / 2.0).abs() < 1e-15);
        let dressed = omega_for_delta(&p, 0.1, 0.03, DetuningConvention::Dressed).unwrap();
        let lam = 2.0 * lamb_shift(dressed, 0.1, 1.0).unwrap();
        assert!((2.0 * dressed + lam - 2.0 * bare).abs() < 1e-13);
        assert!(dressed > bare);
        assert_eq!(centre_plus_site(&p), 200);
    }

    #[test]
    fn resonance_rejected() {
        assert!(lamb_shift(-1.5, 0.1, 1.0).is_err());
        let p = WaveguideParams::new(1.0, 0.0, 0.0, 20, Boundary::Open).unwrap();
        assert!(omega_for_delta(&p, 0.1, 0.0, DetuningConvention::Bare).is_err());
    }
}
