use super::basis::{DoubleExcitationBasis, TwoPhotonBasis};
use super::params::{EmitterSet, WaveguideParams};
use super::sparse::SparseOperator;
use crate::error::{Error, Result};

/// Bose-Hubbard waveguide restricted to two photons.
///
/// States are normalized Fock states, so hopping into or out of a doubly
/// occupied site carries the bosonic factor `sqrt 2`.
pub fn build_two_photon_hamiltonian(p: &WaveguideParams, b: &TwoPhotonBasis) -> Result<SparseOperator> {
    p.validate()?;
    if b.sites() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: b.sites() });
    }
    let mut t = Vec::with_capacity(5 * b.dim());
    push_two_photon(p, b, 0, &mut t);
    SparseOperator::from_triplets(b.dim(), t, true)
}

fn push_two_photon(p: &WaveguideParams, b: &TwoPhotonBasis, offset: usize, t: &mut Vec<(usize, usize, f64)>) {
    for (idx, &(m, n)) in b.pairs().iter().enumerate() {
        let col = offset + idx;
        if m == n {
            t.push((col, col, -p.u_at(n)));
        }
        // bonds (s, s+1); each bond is visited once and emits both directions
        let moves: &[(usize, usize)] = if m == n { &[(m, n)] } else { &[(m, n), (n, m)] };
        for &(from, stay) in moves {
            let Some(to) = p.right(from) else { continue };
            let o_from: f64 = if m == n { 2.0 } else { 1.0 };
            let o_to = if to == stay { 1.0 } else { 0.0 };
            let amp = -p.j * o_from.sqrt() * (o_to + 1.0_f64).sqrt();
            let row = offset + b.index(to, stay);
            t.push((row, col, amp));
            t.push((col, row, amp));
        }
    }
}

/// Emitters plus waveguide in the double-excitation sector.
///
/// Energies are measured in the frame rotating at the cavity frequency; each
/// excited emitter contributes its `omega` (the constant `-sum omega / 2` of the
/// `sigma_z` form is dropped).
pub fn build_full_hamiltonian(p: &WaveguideParams, e: &EmitterSet, b: &DoubleExcitationBasis) -> Result<SparseOperator> {
    p.validate()?;
    e.validate(p)?;
    if b.sites() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: b.sites() });
    }
    if b.emitters() != e.len() {
        return Err(Error::DimensionMismatch { expected: e.len(), got: b.emitters() });
    }
    let em = &e.emitters;
    let mut t = Vec::with_capacity(5 * b.dim() + 4 * em.len() * p.n);
    let sym = |t: &mut Vec<(usize, usize, f64)>, r: usize, c: usize, v: f64| {
        t.push((r, c, v));
        t.push((c, r, v));
    };

    for (pi, &(i, j)) in b.emitter_pairs().iter().enumerate() {
        t.push((pi, pi, em[i].omega + em[j].omega));
        // j relaxes into a photon at its site, i stays excited; and vice versa
        sym(&mut t, pi, b.emitter_photon_index(i, em[j].site), em[j].g);
        sym(&mut t, pi, b.emitter_photon_index(j, em[i].site), em[i].g);
    }

    for (i, ei) in em.iter().enumerate() {
        for s in 0..p.n {
            let row = b.emitter_photon_index(i, s);
            t.push((row, row, ei.omega));
            if let Some(r) = p.right(s) {
                sym(&mut t, row, b.emitter_photon_index(i, r), -p.j);
            }
            // emitter i relaxes, adding a photon at its site next to the one at s
            let amp = if s == ei.site { ei.g * 2f64.sqrt() } else { ei.g };
            sym(&mut t, row, b.photon_index(s, ei.site), amp);
        }
    }

    push_two_photon(p, b.photons(), b.offset_c(), &mut t);
    SparseOperator::from_triplets(b.dim(), t, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::{Boundary, Emitter};

    #[test]
    fn hermitian_and_sized() {
        let p = WaveguideParams::new(1.0, 4.0, 0.2, 9, Boundary::Open).unwrap();
        let e = EmitterSet::new(vec![
            Emitter { omega: -2.5, g: 0.1, site: 4 },
            Emitter { omega: -2.4, g: 0.2, site: 4 },
        ]);
        let b = DoubleExcitationBasis::new(2, 9);
        let h = build_full_hamiltonian(&p, &e, &b).unwrap();
        assert_eq!(h.dim(), 1 + 18 + 45);
        assert_eq!(h.max_asymmetry(), 0.0);
        let pair = b.pair_index(0, 1).unwrap();
        assert!((h.get(pair, pair) + 4.9).abs() < 1e-15);
        assert_eq!(h.get(pair, b.emitter_photon_index(0, 4)), 0.2);
        assert_eq!(h.get(b.emitter_photon_index(0, 4), b.photon_index(4, 4)), 0.1 * 2f64.sqrt());
    }

    #[test]
    fn doubly_occupied_diagonal() {
        let p = WaveguideParams::new(1.0, 4.0, 0.2, 6, Boundary::Periodic).unwrap();
        let b = TwoPhotonBasis::new(6);
        let h = build_two_photon_hamiltonian(&p, &b).unwrap();
        assert_eq!(h.get(b.index(2, 2), b.index(2, 2)), -4.2);
        assert_eq!(h.get(b.index(3, 3), b.index(3, 3)), -3.8);
        assert_eq!(h.get(b.index(2, 2), b.index(2, 3)), -(2f64.sqrt()));
        assert_eq!(h.get(b.index(0, 5), b.index(5, 5)), -(2f64.sqrt()));
        assert_eq!(h.get(b.index(1, 3), b.index(1, 4)), -1.0);
    }
}
