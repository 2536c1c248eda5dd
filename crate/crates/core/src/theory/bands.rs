use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::green::{correlation_length, Channel, K0};
use crate::error::{Error, Result};
use crate::model::WaveguideParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

/// `sqrt(E^2 - c^2)` for both channels, or the domain error.
fn scales(k: f64, e: f64, j: f64) -> Result<(f64, f64)> {
    let mut out = [0.0; 2];
    for (o, ch) in out.iter_mut().zip([Channel::Cos, Channel::Sin]) {
        let c = ch.coefficient(k, j);
        if !(e < 0.0 && e.abs() > c.abs()) {
            return Err(Error::InsideBand { energy: e, edge: c.abs(), branch: ch.index() });
        }
        *o = (e * e - c * c).sqrt();
    }
    Ok((out[0], out[1]))
}

/// The doublon dispersion determinant.
pub fn dispersion_det(k: f64, e: f64, p: &WaveguideParams) -> Result<f64> {
    let (uc, us) = scales(k, e, p.j)?;
    Ok((p.u_c / uc - 1.0) * (p.u_c / us - 1.0) - p.u_m * p.u_m / (uc * us))
}

/// Eigenvalues (ascending) of the symmetric matrix whose determinant is
/// `U_cos U_sin` times [`dispersion_det`]. Both grow monotonically with `|E|`.
fn s_eigenvalues(uc: f64, us: f64, p: &WaveguideParams) -> [f64; 2] {
    let (a, d) = (uc - p.u_c, us - p.u_c);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + p.u_m * p.u_m).sqrt();
    [mean - rad, mean + rad]
}

/// Lowest energy a bound pair can reach, used as the far end of the bracket.
fn energy_floor(k: f64, p: &WaveguideParams) -> f64 {
    -(relative_edge(k, p.j) + p.u_c.abs() + p.u_m.abs() + 1.0)
}

/// `max(4J|cos K/2|, 4J|sin K/2|)`: the continuum edge of the pair at momentum `K`.
pub fn relative_edge(k: f64, j: f64) -> f64 {
    4.0 * j * (k / 2.0).cos().abs().max((k / 2.0).sin().abs())
}

/// Bound-pair energy on `branch` at momentum `k`, or `None` if that branch
/// has merged into the continuum.
pub fn branch_energy(k: f64, branch: Branch, p: &WaveguideParams) -> Option<f64> {
    if p.u_c <= 0.0 {
        return None;
    }
    let slot = match branch {
        Branch::Lower => 0,
        Branch::Upper => 1,
    };
    let mu = |e: f64| {
        let (uc, us) = scales(k, e, p.j).expect("bracket stays outside both relative bands");
        s_eigenvalues(uc, us, p)[slot]
    };
    let edge = relative_edge(k, p.j);
    // a hair outside the edge so both channels are evaluable
    let mut hi = -edge * (1.0 + 1e-15) - 1e-300;
    let mut lo = energy_floor(k, p);
    if mu(hi) >= 0.0 || mu(lo) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mu(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Closed-form branch energies at the band edge `K0`.
pub fn band_edges_k0(p: &WaveguideParams) -> (f64, f64) {
    let e = |u: f64| -(u * u + 8.0 * p.j * p.j).sqrt();
    (e(p.u_c + p.u_m.abs()), e(p.u_c - p.u_m.abs()))
}

/// Least-squares fit of `E_-(K) = E_-(K0) - alpha (K - K0)^2` near the band edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFit {
    pub alpha: f64,
    pub window: f64,
    pub samples: usize,
    pub r_squared: f64,
}

pub const DEFAULT_ALPHA_WINDOW: f64 = 0.05;
pub const DEFAULT_ALPHA_SAMPLES: usize = 21;

pub fn fit_alpha(p: &WaveguideParams, window: f64, samples: usize) -> Result<CurvatureFit> {
    if !(window > 0.0) || samples < 3 {
        return Err(Error::param("alpha window", "need a positive window and at least 3 samples"));
    }
    let pts = (0..samples)
        .map(|i| {
            let k = K0 - window + 2.0 * window * i as f64 / (samples - 1) as f64;
            branch_energy(k, Branch::Lower, p)
                .map(|e| ((k - K0).powi(2), e))
                .ok_or(Error::UnresolvedBranch { k, branch: "lower" })
        })
        .collect::<Result<Vec<_>>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let line = crate::fit::linear(&x, &y)?;
    Ok(CurvatureFit { alpha: -line.slope, window, samples, r_squared: line.r_squared })
}

/// Uniform grid of `count` momenta on `[0, pi]`.
pub fn default_k_grid(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![K0],
        _ => (0..count).map(|i| PI * i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub k: Vec<f64>,
    pub e_minus: Vec<Option<f64>>,
    pub e_plus: Vec<Option<f64>>,
    pub lc_minus: Vec<Option<f64>>,
    pub lc_plus: Vec<Option<f64>>,
    pub k0: f64,
    pub e_minus_k0: Option<f64>,
    pub e_plus_k0: Option<f64>,
    pub curvature: Option<CurvatureFit>,
}

impl BandStructure {
    /// `E_+(K0) - E_-(K0)`, zero when only one branch survives at `K0` and `U_m = 0`.
    pub fn gap_at_k0(&self) -> Option<f64> {
        Some(self.e_plus_k0? - self.e_minus_k0?)
    }

    pub fn alpha(&self) -> Option<f64> {
        self.curvature.map(|c| c.alpha)
    }

    /// Lowest and highest energy reached by a branch over the grid.
    pub fn extent(&self, branch: Branch) -> Option<(f64, f64)> {
        let e = match branch {
            Branch::Lower => &self.e_minus,
            Branch::Upper => &self.e_plus,
        };
        e.iter().flatten().fold(None, |acc, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
        })
    }
}

/// Solves both doublon branches on `k_grid`.
///
/// Momenta whose mirror image `pi - K` (or `-K`) was already solved are copied
/// rather than recomputed.
pub fn solve_bands(p: &WaveguideParams, k_grid: &[f64]) -> Result<BandStructure> {
    p.validate()?;
    if p.u_c <= 0.0 {
        return Err(Error::param("U_c", "doublon bands need a repulsive mean interaction U_c > 0"));
    }
    // canonical representative in [0, pi/2]
    let canon = |k: f64| {
        let mut x = k.rem_euclid(2.0 * PI);
        if x > PI {
            x = 2.0 * PI - x;
        }
        if x > PI / 2.0 {
            x = PI - x;
        }
        x
    };
    let keys: Vec<u64> = k_grid.iter().map(|&k| (canon(k) * 1e12).round() as u64).collect();
    let mut uniq: Vec<(u64, f64)> = keys.iter().zip(k_grid).map(|(&key, &k)| (key, canon(k))).collect();
    uniq.sort_by_key(|u| u.0);
    uniq.dedup_by_key(|u| u.0);

    let solved: Vec<(u64, [Option<f64>; 4])> = uniq
        .par_iter()
        .map(|&(key, k)| {
            let lo = branch_energy(k, Branch::Lower, p);
            let up = branch_energy(k, Branch::Upper, p);
            let lc = |e: Option<f64>| e.and_then(|e| correlation_length(k, e, p).ok());
            (key, [lo, up, lc(lo), lc(up)])
        })
        .collect();
    let lookup = |key: u64| solved[solved.binary_search_by_key(&key, |s| s.0).expect("solved")].1;

    let rows: Vec<[Option<f64>; 4]> = keys.iter().map(|&key| lookup(key)).collect();
    let curvature = fit_alpha(p, DEFAULT_ALPHA_WINDOW, DEFAULT_ALPHA_SAMPLES).ok();
    Ok(BandStructure {
        k: k_grid.to_vec(),
        e_minus: rows.iter().map(|r| r[0]).collect(),
        e_plus: rows.iter().map(|r| r[1]).collect(),
        lc_minus: rows.iter().map(|r| r[2]).collect(),
        lc_plus: rows.iter().map(|r| r[3]).collect(),
        k0: K0,
        e_minus_k0: branch_energy(K0, Branch::Lower, p),
        e_plus_k0: branch_energy(K0, Branch::Upper, p),
        curvature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    fn baseline() -> WaveguideParams {
        WaveguideParams::new(1.0, 4.0, 0.2, 60, Boundary::Periodic).unwrap()
    }

    #[test]
    fn k0_edges_match_closed_form() {
        let p = baseline();
        let (lo, up) = band_edges_k0(&p);
        assert!((branch_energy(K0, Branch::Lower, &p).unwrap() - lo).abs() < 1e-12);
        assert!((branch_energy(K0, Branch::Upper, &p).unwrap() - up).abs() < 1e-12);
        assert!((lo + 5.063595560468865).abs() < 1e-12);
        assert!((up + 4.737087712930805).abs() < 1e-12);
    }

    #[test]
    fn det_brackets_root() {
        let p = baseline();
        let a = dispersion_det(K0, -5.1, &p).unwrap();
        let b = dispersion_det(K0, -5.0, &p).unwrap();
        assert!(a * b < 0.0);
    }

    #[test]
    fn degenerate_root_without_staggering() {
        let p = WaveguideParams { u_m: 0.0, ..baseline() };
        let b = solve_bands(&p, &default_k_grid(11)).unwrap();
        assert!(b.gap_at_k0().unwrap().abs() < 1e-10);
    }

    #[test]
    fn mirrored_momenta_identical() {
        let p = baseline();
        let b = solve_bands(&p, &default_k_grid(21)).unwrap();
        for i in 0..21 {
            assert_eq!(b.e_minus[i], b.e_minus[20 - i]);
            assert_eq!(b.e_plus[i], b.e_plus[20 - i]);
        }
    }
}
