use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real sparse operator in coordinate form.
///
/// Entries are kept sorted by `(row, col)` with duplicates summed and exact
/// zeros dropped. A Hermitian operator stores both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    hermitian: bool,
}

impl SparseOperator {
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>, hermitian: bool) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.max(c) + 1 });
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        let op = Self { dim, entries: merged, hermitian };
        if hermitian && !op.is_symmetric() {
            return Err(Error::param("operator", "flagged Hermitian but the entry set is not symmetric"));
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|i| self.entries[i].2)
            .unwrap_or(0.0)
    }

    /// Largest entrywise asymmetry `|H_ij - H_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    fn is_symmetric(&self) -> bool {
        self.max_asymmetry() == 0.0
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.dim + 1];
        for &(r, _, _) in &self.entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            dim: self.dim,
            row_ptr,
            cols: self.entries.iter().map(|e| e.1).collect(),
            vals: self.entries.iter().map(|e| e.2).collect(),
        }
    }
}

/// Compressed-row form used for matrix-vector products.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    /// `y = A x`, sequential so results are bitwise reproducible.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *yi = acc;
        }
    }

    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| x[self.cols[k]] * self.vals[k]).sum();
        }
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        (0..self.dim).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let (mut d, mut rad) = (0.0, 0.0);
            for (c, v) in self.row(i) {
                if c == i {
                    d += v;
                } else {
                    rad += v.abs();
                }
            }
            (lo.min(d - rad), hi.max(d + rad))
        })
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_drops_zeros() {
        let op = SparseOperator::from_triplets(3, vec![(0, 1, 1.0), (1, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (2, 2, 3.0)], true).unwrap();
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.get(2, 2), 3.0);
    }

    #[test]
    fn rejects_asymmetric_hermitian() {
        assert!(SparseOperator::from_triplets(2, vec![(0, 1, 1.0)], true).is_err());
        assert!(SparseOperator::from_triplets(2, vec![(0, 2, 1.0)], false).is_err());
    }

    #[test]
    fn csr_matches_dense() {
        let op = SparseOperator::from_triplets(3, vec![(0, 0, 2.0), (0, 2, -1.0), (2, 0, -1.0), (1, 1, 0.5)], true).unwrap();
        let x = [Complex64::new(1.0, 2.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 3.0)];
        let mut y = [Complex64::default(); 3];
        op.to_csr().apply(&x, &mut y);
        let d = op.to_dense();
        for i in 0..3 {
            let e: Complex64 = (0..3).map(|j| x[j] * d[(i, j)]).sum();
            assert_eq!(y[i], e);
        }
        assert_eq!(op.to_csr().gershgorin(), (-1.0, 3.0));
    }
}
