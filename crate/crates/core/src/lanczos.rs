//! Lanczos iteration with full reorthogonalization for the low end of a real
//! symmetric sparse spectrum.

use faer::Mat;

use crate::dense::symmetric_eigh;

use crate::error::{Error, Result};
use crate::model::CsrMatrix;

pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Lowest `k` eigenpairs of `h`, each with residual `||Hv - Ev|| <= tol`.
///
/// The Krylov space is grown geometrically up to `max_basis` vectors; failing
/// that the best residual seen is reported.
pub fn lowest(h: &CsrMatrix, k: usize, tol: f64, max_basis: usize) -> Result<EigenPairs> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(Error::param("k", format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    // deterministic start vector with weight on every basis state
    let mut start: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
    let s = dot(&start, &start).sqrt();
    start.iter_mut().for_each(|v| *v /= s);

    let cap = n.min(max_basis.max(k));
    let mut m = (3 * k + 30).min(cap);
    loop {
        let (q, alpha, beta) = krylov(h, &start, m);
        let m_eff = alpha.len();
        let mut t = Mat::<f64>::zeros(m_eff, m_eff);
        for i in 0..m_eff {
            t[(i, i)] = alpha[i];
            if i + 1 < m_eff {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (_, s) = symmetric_eigh(&t)?;
        let take = k.min(m_eff);
        let mut out = EigenPairs { values: vec![], vectors: vec![], residuals: vec![] };
        for c in 0..take {
            let mut v = vec![0.0; n];
            for (i, qi) in q.iter().enumerate() {
                axpy(s[(i, c)], qi, &mut v);
            }
            let nv = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let mut hv = vec![0.0; n];
            h.apply_real(&v, &mut hv);
            let e = dot(&v, &hv);
            axpy(-e, &v, &mut hv);
            out.residuals.push(dot(&hv, &hv).sqrt());
            out.values.push(e);
            out.vectors.push(v);
        }
        let worst = out.residuals.iter().copied().fold(0.0, f64::max);
        if take == k && worst <= tol {
            return Ok(out);
        }
        // invariant subspace reached or basis cap hit
        if m_eff < m || m >= cap {
            return Err(Error::NoConvergence { residual: worst, iterations: m_eff });
        }
        m = (2 * m).min(cap);
    }
}

/// `m` Lanczos steps with full reorthogonalization; stops early on breakdown.
fn krylov(h: &CsrMatrix, start: &[f64], m: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = start.len();
    let mut q: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut w = vec![0.0; n];
    for j in 0..m {
        h.apply_real(&q[j], &mut w);
        let a = dot(&q[j], &w);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        if j + 1 == m || b < 1e-13 * a.abs().max(1.0) {
            break;
        }
        beta.push(b);
        q.push(w.iter().map(|x| x / b).collect());
    }
    (q, alpha, beta)
}
