//! Numerical two-photon spectrum of the bare waveguide.

use std::collections::HashMap;
use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{hermitian_eigh, residual_c, residual_r, symmetric_eigh};
use crate::error::{Error, Result};
use crate::lanczos;
use crate::model::{build_two_photon_hamiltonian, Boundary, TwoPhotonBasis, WaveguideParams};

/// Largest lattice handled by the dense open-chain path.
pub const DENSE_MAX_SITES: usize = 120;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_BUNCHING_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HowMany {
    All,
    Lowest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    Doublon,
    Scattering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: WaveguideParams,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `sum_n |psi(n, n)|^2` per eigenstate.
    pub bunching: Vec<f64>,
    /// Centre-of-mass momentum in `[0, pi)`; periodic lattices only.
    pub momentum: Vec<Option<f64>>,
    pub class: Vec<Option<StateClass>>,
    pub max_residual: f64,
    /// Eigenvectors in the two-photon basis, when requested.
    #[serde(skip)]
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn doublons(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.class[i] == Some(StateClass::Doublon))
    }
}

/// Spectrum of the two-photon Hamiltonian.
///
/// Periodic lattices are block-diagonalized by the two-site translation, which
/// labels every state with its momentum; open chains use a dense solver for
/// `All` and Lanczos for `Lowest`.
pub fn two_excitation_spectrum(p: &WaveguideParams, how: HowMany, keep_vectors: bool) -> Result<SpectrumResult> {
    p.validate()?;
    let basis = TwoPhotonBasis::new(p.n);
    let mut res = match p.boundary {
        Boundary::Periodic => sector_spectrum(p, &basis, keep_vectors)?,
        Boundary::Open => match how {
            HowMany::All => dense_open(p, &basis, keep_vectors)?,
            HowMany::Lowest(k) => lanczos_open(p, &basis, k)?,
        },
    };
    if let HowMany::Lowest(k) = how {
        let k = k.min(res.len());
        res.eigenvalues.truncate(k);
        res.bunching.truncate(k);
        res.momentum.truncate(k);
        res.class.truncate(k);
        if let Some(v) = res.vectors.as_mut() {
            v.truncate(k);
        }
    }
    Ok(res)
}

fn dense_open(p: &WaveguideParams, basis: &TwoPhotonBasis, keep: bool) -> Result<SpectrumResult> {
    if p.n > DENSE_MAX_SITES {
        return Err(Error::param("N", format!("dense spectra are limited to N <= {DENSE_MAX_SITES}; request Lowest(k)")));
    }
    let h = build_two_photon_hamiltonian(p, basis)?;
    let dense = h.to_dense();
    let (evals, evecs) = symmetric_eigh(&dense)?;
    let diag: Vec<usize> = (0..p.n).map(|s| basis.index(s, s)).collect();
    let mut out = empty(p);
    let mut vectors = Vec::new();
    for (c, &e) in evals.iter().enumerate() {
        out.max_residual = out.max_residual.max(residual_r(&dense, &evecs, e, c));
        out.eigenvalues.push(e);
        out.bunching.push(diag.iter().map(|&i| evecs[(i, c)].powi(2)).sum());
        out.momentum.push(None);
        out.class.push(None);
        if keep {
            vectors.push((0..h.dim()).map(|i| Complex64::new(evecs[(i, c)], 0.0)).collect());
        }
    }
    out.vectors = keep.then_some(vectors);
    check_residual(out)
}

fn lanczos_open(p: &WaveguideParams, basis: &TwoPhotonBasis, k: usize) -> Result<SpectrumResult> {
    let h = build_two_photon_hamiltonian(p, basis)?.to_csr();
    let pairs = lanczos::lowest(&h, k, RESIDUAL_TOL, 800)?;
    let mut out = empty(p);
    for (e, (v, r)) in pairs.values.iter().zip(pairs.vectors.iter().zip(&pairs.residuals)) {
        out.eigenvalues.push(*e);
        out.bunching.push((0..p.n).map(|s| v[basis.index(s, s)].powi(2)).sum());
        out.momentum.push(None);
        out.class.push(None);
        out.max_residual = out.max_residual.max(*r);
    }
    Ok(out)
}

fn empty(p: &WaveguideParams) -> SpectrumResult {
    SpectrumResult {
        params: *p,
        eigenvalues: vec![],
        bunching: vec![],
        momentum: vec![],
        class: vec![],
        max_residual: 0.0,
        vectors: None,
    }
}

fn check_residual(out: SpectrumResult) -> Result<SpectrumResult> {
    if out.max_residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence { residual: out.max_residual, iterations: 0 });
    }
    Ok(out)
}

/// Orbits of the two-photon basis under translation by two sites.
struct Orbits {
    /// Representative basis index and orbit length.
    reps: Vec<(usize, usize)>,
    /// For every basis index: (orbit, shift d) with state = T^{2d} rep.
    member: Vec<(usize, usize)>,
}

fn orbits(p: &WaveguideParams, basis: &TwoPhotonBasis) -> Orbits {
    let n = p.n;
    let mut member = vec![(usize::MAX, 0); basis.dim()];
    let mut reps = Vec::new();
    for idx in 0..basis.dim() {
        if member[idx].0 != usize::MAX {
            continue;
        }
        let (a, b) = basis.pair(idx);
        let orbit = reps.len();
        let mut len = 0;
        for d in 0..n / 2 {
            let s = basis.index((a + 2 * d) % n, (b + 2 * d) % n);
            if member[s].0 != usize::MAX {
                break;
            }
            member[s] = (orbit, d);
            len += 1;
        }
        reps.push((idx, len));
    }
    Orbits { reps, member }
}

fn sector_spectrum(p: &WaveguideParams, basis: &TwoPhotonBasis, keep: bool) -> Result<SpectrumResult> {
    let h = build_two_photon_hamiltonian(p, basis)?.to_csr();
    let orb = orbits(p, basis);
    let half = p.n / 2;
    let diag: Vec<bool> = (0..basis.dim()).map(|i| basis.pair(i).0 == basis.pair(i).1).collect();

    let sectors: Vec<Vec<(f64, f64, f64, Option<Vec<Complex64>>)>> = (0..half)
        .into_par_iter()
        .map(|q| {
            let k = 2.0 * PI * q as f64 / p.n as f64;
            // orbits compatible with this momentum: e^{2iK len} = 1
            let allowed: Vec<usize> = (0..orb.reps.len()).filter(|&o| (q * orb.reps[o].1) % half == 0).collect();
            let local: HashMap<usize, usize> = allowed.iter().enumerate().map(|(i, &o)| (o, i)).collect();
            let dim = allowed.len();
            let mut hk = Mat::<Complex64>::zeros(dim, dim);
            for (ia, &oa) in allowed.iter().enumerate() {
                let (rep, la) = orb.reps[oa];
                for (col, v) in h.row(rep) {
                    let (ob, d) = orb.member[col];
                    if let Some(&ib) = local.get(&ob) {
                        let lb = orb.reps[ob].1;
                        let w = (la as f64 / lb as f64).sqrt() * v;
                        hk[(ia, ib)] += Complex64::from_polar(w, 2.0 * k * d as f64);
                    }
                }
            }
            let (evals, v) = hermitian_eigh(&hk)?;
            Ok((0..dim)
                .map(|c| {
                    let e = evals[c];
                    let resid = residual_c(&hk, &v, e, c);
                    let b: f64 = allowed
                        .iter()
                        .enumerate()
                        .filter(|&(_, &o)| diag[orb.reps[o].0])
                        .map(|(i, _)| v[(i, c)].norm_sqr())
                        .sum();
                    let vec = keep.then(|| {
                        let mut full = vec![Complex64::new(0.0, 0.0); basis.dim()];
                        for (s, slot) in full.iter_mut().enumerate() {
                            let (o, d) = orb.member[s];
                            if let Some(&i) = local.get(&o) {
                                let l = orb.reps[o].1 as f64;
                                *slot = v[(i, c)] * Complex64::from_polar(1.0 / l.sqrt(), 2.0 * k * d as f64);
                            }
                        }
                        full
                    });
                    (e, b, resid, vec)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<(f64, f64, f64, f64, Option<Vec<Complex64>>)> = sectors
        .into_iter()
        .enumerate()
        .flat_map(|(q, s)| {
            let k = 2.0 * PI * q as f64 / p.n as f64;
            s.into_iter().map(move |(e, b, r, v)| (e, b, k, r, v))
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.total_cmp(&b.2)));
    if rows.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: rows.len() });
    }
    let mut out = empty(p);
    let mut vectors = Vec::new();
    for (e, b, k, r, v) in rows {
        out.eigenvalues.push(e);
        out.bunching.push(b);
        out.momentum.push(Some(k));
        out.class.push(None);
        out.max_residual = out.max_residual.max(r);
        if let Some(v) = v {
            vectors.push(v);
        }
    }
    out.vectors = keep.then_some(vectors);
    check_residual(out)
}

/// Labels each state Doublon or Scattering.
///
/// A state is a doublon when its bunching weight is at least `threshold` and,
/// for `U_c > 4J`, its energy lies below the scattering continuum.
pub fn classify_doublons(mut s: SpectrumResult, threshold: f64) -> SpectrumResult {
    let edge = -4.0 * s.params.j;
    let gapped = s.params.u_c > 4.0 * s.params.j;
    s.class = s
        .eigenvalues
        .iter()
        .zip(&s.bunching)
        .map(|(&e, &b)| {
            let bound = b >= threshold && (!gapped || e < edge);
            Some(if bound { StateClass::Doublon } else { StateClass::Scattering })
        })
        .collect();
    s
}
