//! Two emitter pairs exchanging their excitation through virtual doublons.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed::spbs_length;
use super::coupling::{coupling_g, DoublonCoupling, DoublonRing};
use super::pair::EmitterPair;
use crate::error::{Error, Result};
use crate::theory::{band_edges_k0, correlation_length_k0, fit_alpha, DEFAULT_ALPHA_SAMPLES, DEFAULT_ALPHA_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlags {
    /// Each pair is tighter than the larger of `L_c(K0)` and `L_I^B`.
    pub compact_pairs: bool,
    /// `L_I^B < D_q <= 2 L_II^B`: single-photon exchange suppressed but the
    /// doublon-mediated one still reaches.
    pub doublon_range: bool,
    pub l_c: f64,
    pub l_single: f64,
    pub l_double: f64,
    pub separations: [usize; 2],
    pub d_q: f64,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.compact_pairs && self.doublon_range
    }
}

/// `D_q = (n_3 + n_4 - n_1 - n_2) / 2`, the distance between pair centres.
pub fn pair_distance(a: &EmitterPair, b: &EmitterPair) -> f64 {
    (b.centre() - a.centre()).abs()
}

/// Pair detuning above the lower doublon band edge, `E_pair - E_-(K0)`.
pub fn pair_delta(pair: &EmitterPair, ring: &DoublonRing) -> Result<f64> {
    let (e_minus, _) = band_edges_k0(&ring.params);
    Ok(pair.energy(ring.params.j)? - e_minus)
}

/// Regime checks; never fails on a violated condition, only on invalid input.
pub fn condition_check(a: &EmitterPair, b: &EmitterPair, ring: &DoublonRing) -> Result<ConditionFlags> {
    let j = ring.params.j;
    let (e_minus, _) = band_edges_k0(&ring.params);
    let l_c = correlation_length_k0(e_minus, j);
    let l_single = [a.first, a.second, b.first, b.second]
        .iter()
        .map(|e| spbs_length(e.omega, j))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let alpha = fit_alpha(&ring.params, DEFAULT_ALPHA_WINDOW, DEFAULT_ALPHA_SAMPLES)?.alpha;
    let delta = pair_delta(a, ring)?;
    let l_double = if delta > 0.0 { (alpha / delta).sqrt() } else { f64::INFINITY };
    let separations = [a.separation(), b.separation()];
    let d_q = pair_distance(a, b);
    let reach = l_c.max(l_single);
    Ok(ConditionFlags {
        compact_pairs: separations.iter().all(|&d| d as f64 <= reach),
        doublon_range: l_single < d_q && d_q <= 2.0 * l_double,
        l_c,
        l_single,
        l_double,
        separations,
        d_q,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourBodyModel {
    pub pairs: [EmitterPair; 2],
    /// Lamb-shifted pair energies.
    pub energies: [f64; 2],
    /// `Delta_Si = -(1/N) sum_K |G_iK|^2 / Delta_K`.
    pub stark: [f64; 2],
    /// `J_RS = -(1/N) sum_K G_1K G*_2K / Delta_K`.
    pub j_rs: Complex64,
    /// `G_K0,1 G*_K0,2 / sqrt(delta alpha) exp(-D_q / L_II^B)` with unit prefactor.
    pub j_rs_edge: Complex64,
    pub d_q: f64,
    pub alpha: f64,
    pub delta: f64,
    pub conditions: ConditionFlags,
    pub couplings: [DoublonCoupling; 2],
}

impl FourBodyModel {
    /// Quarter Rabi period `pi / (2 |J_RS|)`: the first full transfer.
    pub fn swap_time(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.j_rs.norm()
    }
}

pub fn four_body_model(ring: &DoublonRing, a: &EmitterPair, b: &EmitterPair) -> Result<FourBodyModel> {
    let j = ring.params.j;
    let energies = [a.energy(j)?, b.energy(j)?];
    let ca = coupling_g(ring, a)?;
    let cb = coupling_g(ring, b)?;
    let n = ring.n_ring() as f64;
    let mean = 0.5 * (energies[0] + energies[1]);
    for &e in &energies {
        let (lo, hi) = ring.energy.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        if e >= lo && e <= hi {
            return Err(Error::PairInBand { pair_energy: e, band_top: hi });
        }
    }
    let stark_of = |c: &DoublonCoupling, e: f64| -> f64 {
        -c.values.iter().zip(&ring.energy).map(|(g, ek)| g.norm_sqr() / (ek - e)).sum::<f64>() / n
    };
    let stark = [stark_of(&ca, energies[0]), stark_of(&cb, energies[1])];
    let j_rs = -ca
        .values
        .iter()
        .zip(&cb.values)
        .zip(&ring.energy)
        .map(|((g1, g2), ek)| g1 * g2.conj() / (ek - mean))
        .sum::<Complex64>()
        / n;
    let alpha = fit_alpha(&ring.params, DEFAULT_ALPHA_WINDOW, DEFAULT_ALPHA_SAMPLES)?.alpha;
    let delta = pair_delta(a, ring)?;
    let d_q = pair_distance(a, b);
    let j_rs_edge = if delta > 0.0 {
        ca.at_k0() * cb.at_k0().conj() / (delta * alpha).sqrt() * (-d_q / (alpha / delta).sqrt()).exp()
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    };
    let conditions = condition_check(a, b, ring)?;
    Ok(FourBodyModel { pairs: [*a, *b], energies, stark, j_rs, j_rs_edge, d_q, alpha, delta, conditions, couplings: [ca, cb] })
}

/// Scale that maps the band-edge form onto the full sum at a reference
/// distance; the band-edge expression fixes only the shape.
pub fn edge_prefactor(reference: &FourBodyModel) -> f64 {
    reference.j_rs.norm() / reference.j_rs_edge.norm()
}
