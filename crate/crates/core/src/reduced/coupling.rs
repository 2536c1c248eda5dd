use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pair::EmitterPair;
use crate::error::{Error, Result};
use crate::model::{Boundary, WaveguideParams};
use crate::theory::{Branch, DoublonWavefunction, K0};

/// Lower-branch doublon modes on a ring whose size is a multiple of four, so
/// that the band edge `K0 = pi/2` is one of the quantized momenta.
///
/// Centre-of-mass momenta are `K = 2 pi m / N` for `m in [-N/4, N/4)`;
/// `K` and `K + pi` label the same state, so there are `N/2` modes.
#[derive(Debug, Clone)]
pub struct DoublonRing {
    pub params: WaveguideParams,
    pub k: Vec<f64>,
    pub energy: Vec<f64>,
    modes: Vec<DoublonWavefunction>,
}

/// Smallest multiple of four that is at least `n`.
pub fn ring_size(n: usize) -> usize {
    n.div_ceil(4).max(1) * 4
}

impl DoublonRing {
    /// Ring matching the lattice of `p` (boundary ignored).
    pub fn new(p: &WaveguideParams) -> Result<Self> {
        Self::with_size(p, ring_size(p.n))
    }

    pub fn with_size(p: &WaveguideParams, n_ring: usize) -> Result<Self> {
        if n_ring % 4 != 0 {
            return Err(Error::param("ring size", format!("{n_ring} is not a multiple of 4")));
        }
        let params = WaveguideParams::new(p.j, p.u_c, p.u_m, n_ring, Boundary::Periodic)?.with_stagger(p.stagger);
        let quarter = (n_ring / 4) as i64;
        let k: Vec<f64> = (-quarter..quarter).map(|m| 2.0 * PI * m as f64 / n_ring as f64).collect();
        let modes = k.iter().map(|&k| DoublonWavefunction::new(k, Branch::Lower, &params)).collect::<Result<Vec<_>>>()?;
        let energy = modes.iter().map(|m| m.energy).collect();
        Ok(Self { params, k, energy, modes })
    }

    pub fn n_ring(&self) -> usize {
        self.params.n
    }

    pub fn modes(&self) -> &[DoublonWavefunction] {
        &self.modes
    }

    /// Index of `K0` (present because the ring size is a multiple of 4).
    pub fn k0_index(&self) -> usize {
        self.k.iter().position(|&k| (k.abs() - K0).abs() < 1e-12).unwrap_or(0)
    }

    /// Single-photon momenta `2 pi j / N`.
    pub fn photon_momenta(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_ring();
        (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
    }
}

/// `M(K, k, n) = <k, n | Psi_K>`: amplitude for removing a photon of momentum
/// `k` from the doublon and leaving one at site `n`,
/// `(sqrt2 / N) sum_m e^{-ikm} e^{iK x_c} u_K(x_c, m - n)`.
pub fn mode_overlap_m(wf: &DoublonWavefunction, k: f64, n: i64, n_ring: usize) -> Complex64 {
    let r_max = wf.r_max() as i64;
    let s: Complex64 = (-r_max..=r_max).map(|r| Complex64::from_polar(1.0, -k * (n + r) as f64) * wf.bloch(n + r, n)).sum();
    s * (2f64.sqrt() / n_ring as f64)
}

/// Ring single-photon propagator `(1/N) sum_k e^{ikd} / delta_k`,
/// `delta_k = -2J cos k - omega`, for `d = 0..N-1`.
pub fn ring_photon_green(omega: f64, j: f64, n_ring: usize) -> Result<Vec<f64>> {
    if omega.abs() <= 2.0 * j {
        return Err(Error::Resonance { omega, edge: 2.0 * j });
    }
    let dk: Vec<f64> = (0..n_ring).map(|m| -2.0 * j * (2.0 * PI * m as f64 / n_ring as f64).cos() - omega).collect();
    Ok((0..n_ring)
        .map(|d| {
            dk.iter().enumerate().map(|(m, x)| (2.0 * PI * (m * d % n_ring) as f64 / n_ring as f64).cos() / x).sum::<f64>()
                / n_ring as f64
        })
        .collect())
}

/// Effective pair-to-doublon transition rate `G_K` on the ring grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublonCoupling {
    pub k: Vec<f64>,
    pub values: Vec<Complex64>,
    pub sites: (usize, usize),
    pub n_ring: usize,
}

impl DoublonCoupling {
    pub fn at_k0(&self) -> Complex64 {
        let i = self.k.iter().position(|&k| (k.abs() - K0).abs() < 1e-12).unwrap_or(0);
        self.values[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `sum_k e^{ik n_b} M(K, k, n_a) / delta_k`, folded through the ring propagator.
fn half_term(wf: &DoublonWavefunction, green: &[f64], na: i64, nb: i64) -> Complex64 {
    let n = green.len() as i64;
    let r_max = wf.r_max() as i64;
    let s: Complex64 = (-r_max..=r_max)
        .map(|r| wf.bloch(na + r, na) * green[(nb - na - r).rem_euclid(n) as usize])
        .sum();
    s * 2f64.sqrt()
}

/// `G_K = g_a g_b [ sum_k e^{ik n_b} M(K,k,n_a)/delta_k^(b) + (a <-> b) ]`.
///
/// In each term one emitter emits a virtual photon (its own `delta_k`), and the
/// other relaxes next to it, completing the doublon at its own site.
pub fn coupling_g(ring: &DoublonRing, pair: &EmitterPair) -> Result<DoublonCoupling> {
    let n = ring.n_ring();
    let (a, b) = (pair.first, pair.second);
    for e in [a, b] {
        if e.site >= n {
            return Err(Error::SiteOutOfRange { index: 0, site: e.site, n });
        }
    }
    let j = ring.params.j;
    let ga = ring_photon_green(a.omega, j, n)?;
    let gb = if b.omega == a.omega { ga.clone() } else { ring_photon_green(b.omega, j, n)? };
    let (na, nb) = (a.site as i64, b.site as i64);
    let values = ring
        .modes()
        .iter()
        .map(|wf| (half_term(wf, &gb, na, nb) + half_term(wf, &ga, nb, na)) * (a.g * b.g))
        .collect();
    Ok(DoublonCoupling { k: ring.k.clone(), values, sites: (a.site, b.site), n_ring: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Emitter;

    fn baseline() -> WaveguideParams {
        WaveguideParams::new(1.0, 4.0, 0.2, 40, Boundary::Periodic).unwrap()
    }

    #[test]
    fn factored_sum_matches_direct() {
        let ring = DoublonRing::new(&baseline()).unwrap();
        let n = ring.n_ring();
        let omega = -2.51;
        let green = ring_photon_green(omega, 1.0, n).unwrap();
        let wf = &ring.modes()[3];
        for (na, nb) in [(10i64, 10i64), (10, 13), (20, 14)] {
            let direct: Complex64 = ring
                .photon_momenta()
                .map(|k| Complex64::from_polar(1.0, k * nb as f64) * mode_overlap_m(wf, k, na, n) / (-2.0 * k.cos() - omega))
                .sum();
            assert!((direct - half_term(wf, &green, na, nb)).norm() < 1e-13);
        }
    }

    #[test]
    fn g_scales_as_g_squared_and_decouples() {
        let ring = DoublonRing::new(&WaveguideParams::new(1.0, 4.0, 0.2, 120, Boundary::Periodic).unwrap()).unwrap();
        let pair = |g: f64, s2: usize| EmitterPair::new(Emitter { omega: -2.51, g, site: 60 }, Emitter { omega: -2.51, g, site: s2 });
        let c1 = coupling_g(&ring, &pair(0.1, 60)).unwrap();
        let c2 = coupling_g(&ring, &pair(0.2, 60)).unwrap();
        for (x, y) in c1.values.iter().zip(&c2.values) {
            assert!((y / x - 4.0).norm() < 1e-12);
        }
        let far = coupling_g(&ring, &pair(0.1, 80)).unwrap();
        assert!(far.max_abs() < 1e-3 * c1.at_k0().norm());
    }
}
