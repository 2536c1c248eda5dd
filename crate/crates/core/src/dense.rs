//! Thin wrappers over the dense self-adjoint eigensolver.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn sorted<T: Copy>(values: Vec<f64>, vecs: faer::MatRef<'_, T>) -> (Vec<f64>, Mat<T>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let v = Mat::from_fn(vecs.nrows(), order.len(), |i, j| vecs[(i, order[j])]);
    (order.iter().map(|&i| values[i]).collect(), v)
}

fn failed(what: impl std::fmt::Debug) -> Error {
    Error::Regime(format!("dense eigensolver failed: {what:?}"))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix; only the lower triangle is read.
pub fn hermitian_eigh(h: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(failed)?;
    let s = evd.S().column_vector();
    let values = (0..h.nrows()).map(|i| s[i].re).collect();
    Ok(sorted(values, evd.U()))
}

/// Real symmetric counterpart of [`hermitian_eigh`].
pub fn symmetric_eigh(h: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(failed)?;
    let s = evd.S().column_vector();
    let values = (0..h.nrows()).map(|i| s[i]).collect();
    Ok(sorted(values, evd.U()))
}

/// `||H v_c - e v_c||`.
pub fn residual_c(h: &Mat<Complex64>, v: &Mat<Complex64>, e: f64, c: usize) -> f64 {
    (0..h.nrows())
        .map(|i| {
            let hv: Complex64 = (0..h.ncols()).map(|j| h[(i, j)] * v[(j, c)]).sum();
            (hv - v[(i, c)] * e).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn residual_r(h: &Mat<f64>, v: &Mat<f64>, e: f64, c: usize) -> f64 {
    (0..h.nrows())
        .map(|i| {
            let hv: f64 = (0..h.ncols()).map(|j| h[(i, j)] * v[(j, c)]).sum();
            (hv - v[(i, c)] * e).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_hermitian() {
        let mut h = Mat::<Complex64>::zeros(4, 4);
        h[(0, 0)] = Complex64::new(1.0, 0.0);
        h[(1, 1)] = Complex64::new(1.0, 0.0);
        h[(2, 2)] = Complex64::new(2.0, 0.0);
        h[(2, 3)] = Complex64::new(0.0, 0.5);
        h[(3, 2)] = Complex64::new(0.0, -0.5);
        h[(3, 3)] = Complex64::new(2.0, 0.0);
        let (e, v) = hermitian_eigh(&h).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert!((e[2] - 1.5).abs() < 1e-14 && (e[3] - 2.5).abs() < 1e-14);
        for c in 0..4 {
            assert!(residual_c(&h, &v, e[c], c) < 1e-13);
        }
    }
}
