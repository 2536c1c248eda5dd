//! Bound-state profiles and photon correlations from a long-time field.

use serde::{Deserialize, Serialize};

use super::evolve::DynamicsResult;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::fit::decay_length;
use crate::model::DoubleExcitationBasis;

/// Amplitudes below this are treated as no signal.
pub const SIGNAL_FLOOR: f64 = 1e-12;
pub const DEFAULT_SPBS_WINDOW: usize = 4;
/// Relative density below which a site is left out of the G2 sum.
pub const DEFAULT_DENSITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthFit {
    pub length: f64,
    pub r_squared: f64,
    /// Distances from the centre covered by the fit.
    pub window: (f64, f64),
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateProfile {
    pub sites: Vec<f64>,
    pub modulus: Vec<f64>,
    pub centre: f64,
    /// `None` when the window carries no usable signal; see `reason`.
    pub fit: Option<LengthFit>,
    pub reason: Option<String>,
}

impl BoundStateProfile {
    pub fn length(&self) -> Option<f64> {
        self.fit.map(|f| f.length)
    }

    fn fitted(sites: Vec<f64>, modulus: Vec<f64>, centre: f64, pick: impl Fn(f64, f64) -> bool) -> Self {
        let (d, m): (Vec<f64>, Vec<f64>) = sites
            .iter()
            .zip(&modulus)
            .filter(|(x, _)| pick(**x, (**x - centre).abs()))
            .map(|(x, a)| ((x - centre).abs(), *a))
            .unzip();
        let (fit, reason) = if d.len() < 2 {
            (None, Some(format!("only {} points inside the fit window", d.len())))
        } else if let Some(weak) = m.iter().find(|a| **a < SIGNAL_FLOOR) {
            (None, Some(format!("amplitude {weak:e} below the signal floor {SIGNAL_FLOOR:e}")))
        } else {
            match decay_length(&d, &m) {
                Ok((length, line)) => {
                    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (Some(LengthFit { length, r_squared: line.r_squared, window: (lo, hi), points: d.len() }), None)
                }
                Err(e) => (None, Some(e.to_string())),
            }
        };
        Self { sites, modulus, centre, fit, reason }
    }
}

/// Single-photon dressing of emitter `emitter`: the one-photon amplitude left
/// behind with the other emitters excited, fitted on distances
/// `2..=2 + window` to the right of the emitter (left if the chain ends).
pub fn spbs_profile(state: &StateVector, b: &DoubleExcitationBasis, site: usize, emitter: usize, window: usize) -> Result<BoundStateProfile> {
    if emitter >= b.emitters() {
        return Err(Error::param("emitter", format!("index {emitter} but only {} emitters", b.emitters())));
    }
    let n = b.sites();
    let others: Vec<usize> = (0..b.emitters()).filter(|&i| i != emitter || b.emitters() == 1).collect();
    let modulus: Vec<f64> = (0..n)
        .map(|s| others.iter().map(|&i| state.emitter_photon(b, i)[s].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let sites: Vec<f64> = (0..n).map(|s| s as f64).collect();
    let right = site + 2 + window < n;
    let c = site as f64;
    Ok(BoundStateProfile::fitted(sites, modulus, c, |x, d| {
        (if right { x > c } else { x < c }) && d >= 2.0 && d <= (2 + window) as f64
    }))
}

pub fn extract_spbs_profile(res: &DynamicsResult, emitter: usize, window: usize) -> Result<BoundStateProfile> {
    let site = res
        .emitters
        .emitters
        .get(emitter)
        .ok_or_else(|| Error::param("emitter", format!("index {emitter} out of range")))?
        .site;
    spbs_profile(res.long_time_state(), &res.basis(), site, emitter, window)
}

/// Where the centre-of-mass fit of the doublon bound state looks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbsWindow {
    /// First distance from the centre included.
    pub start: f64,
    /// Points per side on the fitted sublattice.
    pub count: usize,
}

impl Default for DbsWindow {
    fn default() -> Self {
        Self { start: 4.0, count: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbsField {
    pub sites: usize,
    /// `|psi(m, n)|^2`, row-major.
    pub joint_density: Vec<f64>,
    /// `|psi(x_c, r = 0)|` fitted on `sublattice`.
    pub profile: BoundStateProfile,
    pub sublattice: usize,
    /// Weight of the diagonal on each sublattice (even, odd).
    pub sublattice_weight: [f64; 2],
}

/// Joint two-photon density and the `r = 0` centre-of-mass profile around
/// `centre`, fitted on the dominant sublattice only.
pub fn dbs_field(state: &StateVector, b: &DoubleExcitationBasis, centre: f64, window: DbsWindow) -> DbsField {
    let diag = state.diagonal(b);
    let mut weight = [0.0; 2];
    for (n, z) in diag.iter().enumerate() {
        weight[n % 2] += z.norm_sqr();
    }
    let sub = usize::from(weight[1] > weight[0]);
    let (sites, modulus): (Vec<f64>, Vec<f64>) =
        diag.iter().enumerate().filter(|(n, _)| n % 2 == sub).map(|(n, z)| (n as f64, z.norm())).unzip();
    let hi = window.start + 2.0 * (window.count.max(1) - 1) as f64 + 1.0;
    let profile = BoundStateProfile::fitted(sites, modulus, centre, |_, d| d >= window.start && d < hi);
    DbsField { sites: b.sites(), joint_density: state.joint_density(b), profile, sublattice: sub, sublattice_weight: weight }
}

/// [`dbs_field`] centred on the mean emitter position.
pub fn extract_dbs_field(res: &DynamicsResult, window: DbsWindow) -> Result<DbsField> {
    if res.emitters.is_empty() {
        return Err(Error::param("emitters", "no emitters to centre on"));
    }
    let centre = res.emitters.iter().map(|e| e.site as f64).sum::<f64>() / res.emitters.len() as f64;
    Ok(dbs_field(res.long_time_state(), &res.basis(), centre, window))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFunction {
    pub r: Vec<i64>,
    pub values: Vec<f64>,
    pub excluded_sites: Vec<usize>,
}

impl CorrelationFunction {
    pub fn at(&self, r: i64) -> Option<f64> {
        self.r.iter().position(|&x| x == r).map(|i| self.values[i])
    }
}

/// `G2(r) = sum_n <a_n^dag a_{n+r}^dag a_{n+r} a_n> / (<n_{n+r}> <n_n>)` in the
/// normalized two-photon block; sites with `<n_n>` below `threshold` are skipped.
pub fn g2_correlation(state: &StateVector, b: &DoubleExcitationBasis, r_max: usize, threshold: f64) -> Result<CorrelationFunction> {
    let w = state.p2(b);
    if !(w > 1e-300) {
        return Err(Error::InsufficientSignal("empty two-photon block".into()));
    }
    let n = b.sites();
    let inv = 1.0 / w;
    let prob = |m: usize, k: usize| state.psi(b, m, k).norm_sqr() * inv;
    let density: Vec<f64> = (0..n).map(|m| 2.0 * (0..n).map(|k| prob(m, k)).sum::<f64>()).collect();
    let keep: Vec<bool> = density.iter().map(|&d| d >= threshold).collect();
    let excluded_sites = (0..n).filter(|&m| !keep[m]).collect();
    let r_max = r_max.min(n - 1) as i64;
    let r: Vec<i64> = (-r_max..=r_max).collect();
    let values = r
        .iter()
        .map(|&r| {
            (0..n as i64)
                .filter_map(|m| {
                    let k = m + r;
                    (k >= 0 && k < n as i64).then_some((m as usize, k as usize))
                })
                .filter(|&(m, k)| keep[m] && keep[k])
                .map(|(m, k)| 2.0 * prob(m, k) / (density[m] * density[k]))
                .sum()
        })
        .collect();
    Ok(CorrelationFunction { r, values, excluded_sites })
}

pub fn extract_g2(res: &DynamicsResult, r_max: usize) -> Result<CorrelationFunction> {
    g2_correlation(res.long_time_state(), &res.basis(), r_max, DEFAULT_DENSITY_THRESHOLD)
}
