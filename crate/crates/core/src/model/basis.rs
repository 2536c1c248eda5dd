use crate::error::{Error, Result};

/// Symmetric two-photon states `|m, n>` with `m <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPhotonBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl TwoPhotonBasis {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n).flat_map(|m| (m..n).map(move |k| (m, k))).collect();
        Self { n, pairs }
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    /// Index of the unordered pair `{a, b}`.
    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        let (m, k) = if a <= b { (a, b) } else { (b, a) };
        debug_assert!(k < self.n);
        m * (2 * self.n - m + 1) / 2 + (k - m)
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Label of a state in the double-excitation sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Emitters `i < j` excited, vacuum field.
    Pair(usize, usize),
    /// Emitter `i` excited, one photon at `site`.
    EmitterPhoton(usize, usize),
    /// Two photons at `m <= n`, emitters in the ground state.
    Photons(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleExcitationBasis {
    emitters: usize,
    n: usize,
    pairs: Vec<(usize, usize)>,
    photons: TwoPhotonBasis,
}

impl DoubleExcitationBasis {
    pub fn new(emitters: usize, n: usize) -> Self {
        let pairs = (0..emitters).flat_map(|i| (i + 1..emitters).map(move |j| (i, j))).collect();
        Self { emitters, n, pairs, photons: TwoPhotonBasis::new(n) }
    }

    pub fn emitters(&self) -> usize {
        self.emitters
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn photons(&self) -> &TwoPhotonBasis {
        &self.photons
    }

    pub fn emitter_pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn offset_b(&self) -> usize {
        self.pairs.len()
    }

    pub fn offset_c(&self) -> usize {
        self.pairs.len() + self.emitters * self.n
    }

    pub fn dim(&self) -> usize {
        self.offset_c() + self.photons.dim()
    }

    pub fn pair_index(&self, i: usize, j: usize) -> Result<usize> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b || b >= self.emitters {
            return Err(Error::param("pair", format!("({i}, {j}) is not an emitter pair")));
        }
        // pairs (0,1..E-1), (1,2..E-1), ...
        Ok(a * self.emitters - a * (a + 1) / 2 + (b - a - 1))
    }

    #[inline]
    pub fn emitter_photon_index(&self, i: usize, site: usize) -> usize {
        self.offset_b() + i * self.n + site
    }

    #[inline]
    pub fn photon_index(&self, a: usize, b: usize) -> usize {
        self.offset_c() + self.photons.index(a, b)
    }

    pub fn index(&self, label: Label) -> Result<usize> {
        match label {
            Label::Pair(i, j) => self.pair_index(i, j),
            Label::EmitterPhoton(i, s) if i < self.emitters && s < self.n => Ok(self.emitter_photon_index(i, s)),
            Label::Photons(a, b) if a < self.n && b < self.n => Ok(self.photon_index(a, b)),
            other => Err(Error::param("label", format!("{other:?} outside the basis"))),
        }
    }

    pub fn label(&self, idx: usize) -> Result<Label> {
        if idx < self.offset_b() {
            let (i, j) = self.pairs[idx];
            Ok(Label::Pair(i, j))
        } else if idx < self.offset_c() {
            let r = idx - self.offset_b();
            Ok(Label::EmitterPhoton(r / self.n, r % self.n))
        } else if idx < self.dim() {
            let (m, k) = self.photons.pair(idx - self.offset_c());
            Ok(Label::Photons(m, k))
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: idx })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_photon_dimension_and_roundtrip() {
        let b = TwoPhotonBasis::new(8);
        assert_eq!(b.dim(), 36);
        for (idx, &(m, k)) in b.pairs().iter().enumerate() {
            assert_eq!(b.index(m, k), idx);
            assert_eq!(b.index(k, m), idx);
        }
    }

    #[test]
    fn double_excitation_roundtrip() {
        let b = DoubleExcitationBasis::new(4, 7);
        assert_eq!(b.dim(), 6 + 28 + 28);
        for idx in 0..b.dim() {
            let l = b.label(idx).unwrap();
            assert_eq!(b.index(l).unwrap(), idx);
        }
        assert!(b.label(b.dim()).is_err());
    }
}
