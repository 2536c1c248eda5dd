//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use doublon::dense::symmetric_eigh;
use doublon::model::{build_full_hamiltonian, DoubleExcitationBasis, EmitterSet, WaveguideParams};
use num_complex::Complex64;

fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, tol: f64, depth: u32) -> f64 {
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1) + adaptive(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson with Richardson correction.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_step(&f, a, fa, b, fb);
    adaptive(&f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// `exp(-iHt) psi0` through the eigendecomposition of the dense matrix.
pub fn dense_propagate(p: &WaveguideParams, e: &EmitterSet, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
    let b = DoubleExcitationBasis::new(e.len(), p.n);
    let h = build_full_hamiltonian(p, e, &b).unwrap().to_dense();
    let (vals, v) = symmetric_eigh(&h).unwrap();
    let d = vals.len();
    let coef: Vec<Complex64> = (0..d)
        .map(|c| (0..d).map(|i| v[(i, c)] * psi0[i]).sum::<Complex64>() * Complex64::from_polar(1.0, -vals[c] * t))
        .collect();
    (0..d).map(|i| (0..d).map(|c| v[(i, c)] * coef[c]).sum()).collect()
}

/// Uniform draws in `[0, 1)` from a fixed xorshift stream.
pub struct Draws(u64);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}
