//! Two-pair layouts placed symmetrically about the lattice centre.

use crate::error::{Error, Result};
use crate::model::{Emitter, WaveguideParams};
use crate::reduced::EmitterPair;

/// Pairs `(n1, n1 + d1)` and `(n3, n3 + d2)` with centre distance `d_q`.
///
/// All four sites sit on the `U_c + U_m` sublattice, so `d1`, `d2` and
/// `d_q - (d2 - d1)/2` must be even. `n1` is the sublattice site nearest to
/// where the layout centre lands on the chain centre.
pub fn two_pair_layout(p: &WaveguideParams, omega: f64, g: f64, d_q: f64, d1: usize, d2: usize) -> Result<[EmitterPair; 2]> {
    if d1 % 2 != 0 || d2 % 2 != 0 {
        return Err(Error::param("d^e", format!("intra-pair distances {d1}, {d2} must be even")));
    }
    let shift = d_q - (d2 as f64 - d1 as f64) / 2.0;
    if d_q.fract() != 0.0 || shift.rem_euclid(2.0) != 0.0 {
        return Err(Error::param("D_q", format!("D_q = {d_q} puts the second pair off the sublattice (need D_q - (d2 - d1)/2 even)")));
    }
    if shift <= d1 as f64 {
        return Err(Error::param("D_q", format!("D_q = {d_q} makes the pairs overlap")));
    }
    let parity = p.plus_parity() as i64;
    let target = 0.5 * (p.n as f64 - 1.0) - 0.5 * (d1 as f64 + d_q);
    let mut n1 = target.round() as i64;
    if n1.rem_euclid(2) != parity {
        n1 += if (n1 as f64) < target { 1 } else { -1 };
    }
    let n3 = n1 + shift as i64;
    let last = n3 + d2 as i64;
    if n1 < 0 || last >= p.n as i64 {
        return Err(Error::param("D_q", format!("layout spans sites {n1}..={last}, outside the {} sites", p.n)));
    }
    let at = |site: i64| Emitter { omega, g, site: site as usize };
    Ok([EmitterPair::new(at(n1), at(n1 + d1 as i64)), EmitterPair::new(at(n3), at(last))])
}
