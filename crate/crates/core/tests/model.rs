//! Hamiltonian builders against a brute-force Fock-space oracle.

use std::collections::HashMap;

use doublon::model::{
    build_full_hamiltonian, build_two_photon_hamiltonian, Boundary, DoubleExcitationBasis, Emitter, EmitterSet, Label,
    SparseOperator, Stagger, TwoPhotonBasis, WaveguideParams,
};
use proptest::prelude::*;

/// Emitter excitations and photon occupations.
type Fock = (Vec<u8>, Vec<u8>);

fn u_oracle(p: &WaveguideParams, s: usize) -> f64 {
    let plus = match p.stagger {
        Stagger::EvenPlus => s % 2 == 0,
        Stagger::OddPlus => s % 2 == 1,
    };
    if plus {
        p.u_c + p.u_m
    } else {
        p.u_c - p.u_m
    }
}

fn bonds(p: &WaveguideParams) -> Vec<(usize, usize)> {
    let mut b: Vec<_> = (0..p.n - 1).map(|s| (s, s + 1)).collect();
    if p.boundary == Boundary::Periodic {
        b.push((p.n - 1, 0));
    }
    b
}

/// `H|f>` term by term, straight from the second-quantized form.
fn apply(p: &WaveguideParams, em: &[Emitter], f: &Fock) -> Vec<(Fock, f64)> {
    let (e, occ) = f;
    let mut out = Vec::new();
    let diag: f64 = em.iter().zip(e).map(|(x, &s)| x.omega * s as f64).sum::<f64>()
        + occ.iter().enumerate().map(|(s, &n)| -0.5 * u_oracle(p, s) * (n as f64) * (n as f64 - 1.0)).sum::<f64>();
    out.push((f.clone(), diag));
    for (a, b) in bonds(p) {
        for (from, to) in [(a, b), (b, a)] {
            if occ[from] > 0 {
                let mut o = occ.clone();
                let amp = -p.j * (o[from] as f64).sqrt() * (o[to] as f64 + 1.0).sqrt();
                o[from] -= 1;
                o[to] += 1;
                out.push(((e.clone(), o), amp));
            }
        }
    }
    for (i, x) in em.iter().enumerate() {
        if e[i] == 1 {
            let (mut e2, mut o) = (e.clone(), occ.clone());
            let amp = x.g * (o[x.site] as f64 + 1.0).sqrt();
            e2[i] = 0;
            o[x.site] += 1;
            out.push(((e2, o), amp));
        } else if occ[x.site] > 0 {
            let (mut e2, mut o) = (e.clone(), occ.clone());
            let amp = x.g * (o[x.site] as f64).sqrt();
            e2[i] = 1;
            o[x.site] -= 1;
            out.push(((e2, o), amp));
        }
    }
    out
}

fn fock_of(label: Label, em: &[Emitter], n: usize) -> Fock {
    let mut e = vec![0u8; em.len()];
    let mut occ = vec![0u8; n];
    match label {
        Label::Pair(i, j) => {
            e[i] = 1;
            e[j] = 1;
        }
        Label::EmitterPhoton(i, s) => {
            e[i] = 1;
            occ[s] += 1;
        }
        Label::Photons(a, b) => {
            occ[a] += 1;
            occ[b] += 1;
        }
    }
    (e, occ)
}

/// Largest entrywise difference between `h` and the oracle on `states`.
fn oracle_gap(p: &WaveguideParams, em: &[Emitter], states: &[Fock], h: &SparseOperator) -> f64 {
    let index: HashMap<&Fock, usize> = states.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let d = states.len();
    let mut dense = vec![0.0; d * d];
    for (c, f) in states.iter().enumerate() {
        for (g, amp) in apply(p, em, f) {
            let r = *index.get(&g).expect("H leaves the double-excitation sector");
            dense[r * d + c] += amp;
        }
    }
    let mut gap = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            gap = gap.max((dense[r * d + c] - h.get(r, c)).abs());
        }
    }
    gap
}

fn lattice() -> impl Strategy<Value = WaveguideParams> {
    (2usize..5, any::<bool>(), any::<bool>(), 0.3f64..2.0, 0.0f64..8.0, -1.0f64..1.0).prop_map(|(half, periodic, odd, j, u_c, u_m)| {
        let (n, boundary) = if periodic { (2 * half, Boundary::Periodic) } else { (2 * half + 1, Boundary::Open) };
        let stagger = if odd { Stagger::OddPlus } else { Stagger::EvenPlus };
        WaveguideParams::new(j, u_c, u_m, n, boundary).unwrap().with_stagger(stagger)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_photon_matches_fock_oracle(p in lattice()) {
        let b = TwoPhotonBasis::new(p.n);
        let h = build_two_photon_hamiltonian(&p, &b).unwrap();
        let states: Vec<Fock> = (0..b.dim()).map(|i| {
            let (m, n) = b.pair(i);
            fock_of(Label::Photons(m, n), &[], p.n)
        }).collect();
        prop_assert_eq!(h.max_asymmetry(), 0.0);
        prop_assert!(oracle_gap(&p, &[], &states, &h) < 1e-14);
    }

    #[test]
    fn full_matches_fock_oracle(
        p in lattice(),
        raw in prop::collection::vec((-3.0f64..3.0, 0.0f64..0.5, 0usize..64), 1..4),
    ) {
        let em: Vec<Emitter> = raw.iter().map(|&(omega, g, s)| Emitter { omega, g, site: s % p.n }).collect();
        let b = DoubleExcitationBasis::new(em.len(), p.n);
        let h = build_full_hamiltonian(&p, &EmitterSet::new(em.clone()), &b).unwrap();
        let states: Vec<Fock> = (0..b.dim()).map(|i| fock_of(b.label(i).unwrap(), &em, p.n)).collect();
        prop_assert_eq!(h.dim(), em.len() * (em.len() - 1) / 2 + em.len() * p.n + p.n * (p.n + 1) / 2);
        prop_assert_eq!(h.max_asymmetry(), 0.0);
        // every image of a basis state is found in the basis, so the sector is closed
        prop_assert!(oracle_gap(&p, &em, &states, &h) < 1e-14);
    }
}

/// `max |H[T r, T c] - H'[r, c]|` for the translation `s -> s + shift` on a ring.
fn translated_gap(h: &SparseOperator, h2: &SparseOperator, b: &TwoPhotonBasis, shift: usize) -> f64 {
    let n = b.sites();
    let t = |i: usize| {
        let (m, k) = b.pair(i);
        b.index((m + shift) % n, (k + shift) % n)
    };
    let mut gap = 0.0f64;
    for r in 0..b.dim() {
        for c in 0..b.dim() {
            gap = gap.max((h.get(t(r), t(c)) - h2.get(r, c)).abs());
        }
    }
    gap
}

#[test]
fn ring_commutes_with_two_site_translation() {
    for (n, u_m) in [(6, 0.0), (8, 0.0), (8, 0.7)] {
        let p = WaveguideParams::new(1.0, 3.0, u_m, n, Boundary::Periodic).unwrap();
        let b = TwoPhotonBasis::new(n);
        let h = build_two_photon_hamiltonian(&p, &b).unwrap();
        assert_eq!(translated_gap(&h, &h, &b, 2), 0.0, "N={n} U_m={u_m}");
    }
}

#[test]
fn stagger_flip_is_one_site_translation() {
    let p = WaveguideParams::new(1.0, 4.0, 0.2, 8, Boundary::Periodic).unwrap();
    let b = TwoPhotonBasis::new(8);
    let even = build_two_photon_hamiltonian(&p, &b).unwrap();
    let odd = build_two_photon_hamiltonian(&p.with_stagger(Stagger::OddPlus), &b).unwrap();
    assert_eq!(translated_gap(&odd, &even, &b, 1), 0.0);
    assert!(translated_gap(&even, &even, &b, 1) > 0.1);
}
