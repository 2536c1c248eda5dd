use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DoubleExcitationBasis, Label};

/// Amplitudes over a [`DoubleExcitationBasis`] at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl StateVector {
    pub fn basis_state(b: &DoubleExcitationBasis, label: Label) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); b.dim()];
        amplitudes[b.index(label)?] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, time: 0.0 })
    }

    pub fn new(b: &DoubleExcitationBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != b.dim() {
            return Err(Error::DimensionMismatch { expected: b.dim(), got: amplitudes.len() });
        }
        Ok(Self { amplitudes, time: 0.0 })
    }

    pub fn norm(&self) -> f64 {
        crate::propagate::norm(&self.amplitudes)
    }

    fn block_weight(&self, range: std::ops::Range<usize>) -> f64 {
        self.amplitudes[range].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn pair_amplitude(&self, b: &DoubleExcitationBasis, i: usize, j: usize) -> Result<Complex64> {
        Ok(self.amplitudes[b.pair_index(i, j)?])
    }

    /// Probability of one emitter excited plus one photon.
    pub fn p1(&self, b: &DoubleExcitationBasis) -> f64 {
        self.block_weight(b.offset_b()..b.offset_c())
    }

    /// Probability of two photons and no excited emitter.
    pub fn p2(&self, b: &DoubleExcitationBasis) -> f64 {
        self.block_weight(b.offset_c()..b.dim())
    }

    /// Photon amplitudes `c_{i,n}` with emitter `i` left excited.
    pub fn emitter_photon(&self, b: &DoubleExcitationBasis, i: usize) -> &[Complex64] {
        let start = b.emitter_photon_index(i, 0);
        &self.amplitudes[start..start + b.sites()]
    }

    /// `<a_n^dag a_n>` within the one-photon block.
    pub fn photon_density(&self, b: &DoubleExcitationBasis) -> Vec<f64> {
        let mut d = vec![0.0; b.sites()];
        for i in 0..b.emitters() {
            for (dn, c) in d.iter_mut().zip(self.emitter_photon(b, i)) {
                *dn += c.norm_sqr();
            }
        }
        d
    }

    /// First-quantized two-photon amplitude, normalized so that the sum of
    /// `|psi(m, n)|^2` over ordered pairs equals the block weight.
    pub fn psi(&self, b: &DoubleExcitationBasis, m: usize, n: usize) -> Complex64 {
        let c = self.amplitudes[b.photon_index(m, n)];
        if m == n {
            c
        } else {
            c * SQRT_HALF
        }
    }

    /// `|psi(m, n)|^2`, row-major `n x n`.
    pub fn joint_density(&self, b: &DoubleExcitationBasis) -> Vec<f64> {
        let n = b.sites();
        (0..n * n).map(|k| self.psi(b, k / n, k % n).norm_sqr()).collect()
    }

    /// `psi(n, n)`.
    pub fn diagonal(&self, b: &DoubleExcitationBasis) -> Vec<Complex64> {
        (0..b.sites()).map(|n| self.psi(b, n, n)).collect()
    }
}
