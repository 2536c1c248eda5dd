//! Unitary propagation `psi(t + tau) = exp(-i H tau) psi(t)`.
//!
//! The default scheme is a Chebyshev expansion with Bessel coefficients, which
//! is accurate to machine precision per step and therefore keeps the norm
//! without any renormalization. Classical RK4 is available for comparison;
//! its step is reduced until the predicted norm loss stays below tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::CsrMatrix;

/// A Hermitian operator that can act on complex vectors.
pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    /// Interval enclosing the spectrum.
    fn spectral_bounds(&self) -> (f64, f64);
}

impl HermitianOp for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        CsrMatrix::apply(self, x, y)
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        self.gershgorin()
    }
}

/// Dense Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Sets `(i, j)` and its conjugate partner.
    pub fn set_pair(&mut self, i: usize, j: usize, v: Complex64) {
        self.set(i, j, v);
        self.set(j, i, v.conj());
    }

    pub fn max_asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }
}

impl HermitianOp for DenseHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        (0..self.n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let d = self.get(i, i).re;
            let rad: f64 = (0..self.n).filter(|&j| j != i).map(|j| self.get(i, j).norm()).sum();
            (lo.min(d - rad), hi.max(d + rad))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrator {
    /// Chebyshev expansion; `max_arg` bounds `a * tau` of one sub-step.
    Chebyshev { max_arg: f64 },
    /// Classical fourth-order Runge-Kutta with an optional fixed step.
    Rk4 { dt: Option<f64> },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Chebyshev { max_arg: 40.0 }
    }
}

/// Bessel functions `J_0(x) .. J_nmax(x)` by Miller's backward recurrence.
pub fn bessel_j_sequence(x: f64, nmax: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        return v;
    }
    let ax = x.abs();
    let top = nmax.max(ax as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k <= nmax {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    if x < 0.0 {
        out.iter_mut().enumerate().filter(|(k, _)| k % 2 == 1).for_each(|(_, v)| *v = -*v);
    }
    out
}

/// One fixed step `exp(-i H tau)` prepared for a given operator.
pub struct Stepper<'a, H: HermitianOp> {
    op: &'a H,
    scheme: Scheme,
    work: [Vec<Complex64>; 4],
    pub matvecs: u64,
}

enum Scheme {
    Chebyshev { centre: f64, half_width: f64, coeffs: Vec<Complex64>, phase: Complex64, substeps: usize },
    Rk4 { centre: f64, dt: f64, substeps: usize },
}

impl<'a, H: HermitianOp> Stepper<'a, H> {
    /// Prepares `exp(-i H tau)`; `t_total` sizes the RK4 drift budget.
    pub fn new(op: &'a H, tau: f64, integrator: Integrator, t_total: f64, drift_tol: f64) -> Self {
        let (lo, hi) = op.spectral_bounds();
        let centre = 0.5 * (lo + hi);
        let half_width = (0.5 * (hi - lo)).max(1e-12) * 1.01;
        let n = op.dim();
        let scheme = match integrator {
            Integrator::Chebyshev { max_arg } => {
                let substeps = ((half_width * tau.abs()) / max_arg).ceil().max(1.0) as usize;
                let h = tau / substeps as f64;
                let arg = half_width * h;
                let nmax = (arg + 12.0 * arg.max(1.0).cbrt() + 30.0).ceil() as usize;
                let j = bessel_j_sequence(arg, nmax);
                let mut coeffs: Vec<Complex64> = j
                    .iter()
                    .enumerate()
                    .map(|(k, &jk)| {
                        let w = if k == 0 { 1.0 } else { 2.0 };
                        // (-i)^k
                        let ph = match k % 4 {
                            0 => Complex64::new(1.0, 0.0),
                            1 => Complex64::new(0.0, -1.0),
                            2 => Complex64::new(-1.0, 0.0),
                            _ => Complex64::new(0.0, 1.0),
                        };
                        ph * (w * jk)
                    })
                    .collect();
                while coeffs.len() > 1 && coeffs.last().map(|c| c.norm() < 1e-18).unwrap_or(false) && coeffs.len() > arg as usize + 1 {
                    coeffs.pop();
                }
                Scheme::Chebyshev { centre, half_width, coeffs, phase: Complex64::from_polar(1.0, -centre * h), substeps }
            }
            Integrator::Rk4 { dt } => {
                let rho = half_width;
                let dt0 = dt.unwrap_or_else(|| {
                    // order-6 defect y^6/72 per step, summed over the run
                    let budget = (36.0 * drift_tol / (t_total.max(tau) * rho.powi(6))).powf(0.2);
                    let norm_inf = (hi.abs()).max(lo.abs());
                    (0.02f64).min(0.2 / norm_inf).min(budget)
                });
                let substeps = (tau.abs() / dt0).ceil().max(1.0) as usize;
                Scheme::Rk4 { centre, dt: tau / substeps as f64, substeps }
            }
        };
        Self { op, scheme, work: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]), matvecs: 0 }
    }

    /// Human-readable integrator settings for metadata.
    pub fn describe(&self) -> String {
        match &self.scheme {
            Scheme::Chebyshev { centre, half_width, coeffs, substeps, .. } => format!(
                "chebyshev terms={} substeps={} centre={centre} half_width={half_width}",
                coeffs.len(),
                substeps
            ),
            Scheme::Rk4 { dt, substeps, .. } => format!("rk4 dt={dt} substeps={substeps}"),
        }
    }

    /// `y = (H - c) x / s`.
    fn scaled(op: &H, x: &[Complex64], y: &mut [Complex64], c: f64, s: f64) {
        op.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (*yi - xi * c) / s;
        }
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        match &self.scheme {
            Scheme::Chebyshev { centre, half_width, coeffs, phase, substeps } => {
                let (c, s, ph) = (*centre, *half_width, *phase);
                for _ in 0..*substeps {
                    let [prev, cur, next, acc] = &mut self.work;
                    prev.copy_from_slice(psi);
                    for (a, p) in acc.iter_mut().zip(prev.iter()) {
                        *a = p * coeffs[0];
                    }
                    if coeffs.len() > 1 {
                        Self::scaled(self.op, prev, cur, c, s);
                        self.matvecs += 1;
                        for (a, v) in acc.iter_mut().zip(cur.iter()) {
                            *a += v * coeffs[1];
                        }
                    }
                    for ck in coeffs.iter().skip(2) {
                        Self::scaled(self.op, cur, next, c, s);
                        self.matvecs += 1;
                        for ((nx, pv), a) in next.iter_mut().zip(prev.iter()).zip(acc.iter_mut()) {
                            *nx = *nx * 2.0 - pv;
                            *a += *nx * ck;
                        }
                        std::mem::swap(prev, cur);
                        std::mem::swap(cur, next);
                    }
                    for (p, a) in psi.iter_mut().zip(acc.iter()) {
                        *p = a * ph;
                    }
                }
            }
            Scheme::Rk4 { centre, dt, substeps } => {
                let (c, h) = (*centre, *dt);
                let mi = Complex64::new(0.0, -1.0);
                for _ in 0..*substeps {
                    let [k, tmp, acc, _] = &mut self.work;
                    // k1
                    Self::scaled(self.op, psi, k, c, 1.0);
                    k.iter_mut().for_each(|v| *v *= mi);
                    for ((a, t), (p, kv)) in acc.iter_mut().zip(tmp.iter_mut()).zip(psi.iter().zip(k.iter())) {
                        *a = *p + kv * (h / 6.0);
                        *t = *p + kv * (h / 2.0);
                    }
                    for (w, frac) in [(2.0, 0.5), (2.0, 1.0), (1.0, 0.0)] {
                        Self::scaled(self.op, tmp, k, c, 1.0);
                        k.iter_mut().for_each(|v| *v *= mi);
                        for ((a, t), (p, kv)) in acc.iter_mut().zip(tmp.iter_mut()).zip(psi.iter().zip(k.iter())) {
                            *a += kv * (w * h / 6.0);
                            *t = *p + kv * (frac * h);
                        }
                    }
                    self.matvecs += 4;
                    let ph = Complex64::from_polar(1.0, -c * h);
                    for (p, a) in psi.iter_mut().zip(acc.iter()) {
                        *p = a * ph;
                    }
                }
            }
        }
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<v|H|v>`.
pub fn expectation<H: HermitianOp>(op: &H, v: &[Complex64], scratch: &mut [Complex64]) -> f64 {
    op.apply(v, scratch);
    v.iter().zip(scratch.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}
