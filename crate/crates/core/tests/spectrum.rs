//! Exact two-photon spectra against the band roots and the analytic doublon.

use std::f64::consts::PI;

use doublon::model::{Boundary, TwoPhotonBasis, WaveguideParams};
use doublon::reduced::mode_overlap_m;
use doublon::spectrum::{classify_doublons, two_excitation_spectrum, HowMany, DEFAULT_BUNCHING_THRESHOLD};
use doublon::theory::{branch_energy, Branch, DoublonWavefunction, K0};
use num_complex::Complex64;

mod common;
use common::Draws;

/// Fixed draws so that the sizes below stay reproducible.
fn draws(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut d = Draws::new(seed);
    (0..count).map(|_| (4.2 + 3.5 * d.next(), 0.05 + 0.9 * d.next())).collect()
}

#[test]
fn doublon_eigenvalues_are_band_roots() {
    for n in [20, 40, 60] {
        for (u_c, u_m) in draws(n as u64 * 7919 + 1, 5) {
            let p = WaveguideParams::new(1.0, u_c, u_m, n, Boundary::Periodic).unwrap();
            let s = classify_doublons(two_excitation_spectrum(&p, HowMany::All, false).unwrap(), DEFAULT_BUNCHING_THRESHOLD);
            assert!(s.max_residual < 1e-10);
            let mut count = 0;
            for i in s.doublons() {
                let k = s.momentum[i].unwrap();
                let gap = [Branch::Lower, Branch::Upper]
                    .iter()
                    .filter_map(|&b| branch_energy(k, b, &p))
                    .map(|e| (e - s.eigenvalues[i]).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(gap < 1e-4, "N={n} U_c={u_c} U_m={u_m} K={k}: off by {gap}");
                count += 1;
            }
            // two branches over N/2 centre-of-mass momenta
            assert_eq!(count, n, "N={n} U_c={u_c} U_m={u_m}");
        }
    }
}

#[test]
fn doublons_move_continuously_with_u_m() {
    let mut prev: Option<Vec<f64>> = None;
    for step in 0..=20 {
        let p = WaveguideParams::new(1.0, 4.5, 0.02 * step as f64, 20, Boundary::Periodic).unwrap();
        let s = classify_doublons(two_excitation_spectrum(&p, HowMany::All, false).unwrap(), DEFAULT_BUNCHING_THRESHOLD);
        let e: Vec<f64> = s.doublons().map(|i| s.eigenvalues[i]).collect();
        assert_eq!(e.len(), 20);
        assert!(e.iter().all(|&x| x < -4.0));
        if let Some(prev) = &prev {
            let jump = prev.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(jump < 0.03, "step {step}: jump {jump}");
        }
        prev = Some(e);
    }
}

/// Lower-band K0 eigenvector of an `n`-site ring as a first-quantized
/// amplitude `psi(m, k)` normalized over ordered pairs.
fn k0_doublon(p: &WaveguideParams) -> impl Fn(usize, usize) -> Complex64 {
    let s = two_excitation_spectrum(p, HowMany::All, true).unwrap();
    let e0 = branch_energy(K0, Branch::Lower, p).unwrap();
    let idx = (0..s.len())
        .filter(|&i| s.momentum[i].is_some_and(|k| (k - K0).abs() < 1e-9))
        .min_by(|&a, &b| (s.eigenvalues[a] - e0).abs().total_cmp(&(s.eigenvalues[b] - e0).abs()))
        .unwrap();
    assert!((s.eigenvalues[idx] - e0).abs() < 1e-8);
    let v = s.vectors.unwrap().swap_remove(idx);
    let b = TwoPhotonBasis::new(p.n);
    move |m, k| {
        let c = v[b.index(m, k)];
        if m == k {
            c
        } else {
            c / 2f64.sqrt()
        }
    }
}

#[test]
fn analytic_doublon_overlaps_exact_eigenvector() {
    let p = WaveguideParams::new(1.0, 4.0, 0.2, 40, Boundary::Periodic).unwrap();
    let psi = k0_doublon(&p);
    let wf = DoublonWavefunction::new(K0, Branch::Lower, &p).unwrap();
    let n = p.n as i64;
    // ring images of the infinite-lattice form, normalized over ordered pairs
    let analytic = |m: usize, k: usize| -> Complex64 {
        let (m, k) = (m as i64, k as i64);
        (-1..=1).map(|w| wf.bloch(m, k + w * n)).sum::<Complex64>() / (n as f64).sqrt()
    };
    let (mut overlap, mut norm) = (Complex64::new(0.0, 0.0), 0.0);
    for m in 0..p.n {
        for k in 0..p.n {
            overlap += analytic(m, k).conj() * psi(m, k);
            norm += analytic(m, k).norm_sqr();
        }
    }
    assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
    assert!((overlap.norm() - 1.0).abs() < 1e-8, "overlap {}", overlap.norm());
}

#[test]
fn mode_overlap_matches_exact_eigenvector() {
    let p = WaveguideParams::new(1.0, 4.0, 0.2, 40, Boundary::Periodic).unwrap();
    let psi = k0_doublon(&p);
    let wf = DoublonWavefunction::new(K0, Branch::Lower, &p).unwrap();
    let n = p.n;
    // <k, s| Psi> = sqrt(2/N) sum_m e^{-ikm} psi(m, s)
    let exact = |k: f64, s: usize| -> Complex64 {
        (0..n).map(|m| Complex64::from_polar(1.0, -k * m as f64) * psi(m, s)).sum::<Complex64>() * (2.0 / n as f64).sqrt()
    };
    let probes: Vec<(f64, usize)> =
        [1usize, 7, 13, 20].iter().flat_map(|&j| [10usize, 11, 20].map(move |s| (2.0 * PI * j as f64 / n as f64, s))).collect();
    let reference = probes
        .iter()
        .map(|&(k, s)| (exact(k, s), mode_overlap_m(&wf, k, s as i64, n)))
        .max_by(|a, b| a.0.norm().total_cmp(&b.0.norm()))
        .unwrap();
    let phase = reference.0 / reference.1;
    assert!((phase.norm() - 1.0).abs() < 1e-10);
    for &(k, s) in &probes {
        let d = (exact(k, s) - phase * mode_overlap_m(&wf, k, s as i64, n)).norm();
        assert!(d < 1e-10, "k={k} s={s}: {d}");
    }
}

#[test]
fn upper_branch_meets_continuum_near_zero_momentum() {
    // at U_c = 4 the upper doublon band only exists for |K| above ~0.1
    let p = WaveguideParams::new(1.0, 4.0, 0.2, 60, Boundary::Periodic).unwrap();
    assert!(branch_energy(0.09, Branch::Upper, &p).is_none());
    let e = branch_energy(0.11, Branch::Upper, &p).unwrap();
    assert!(e < -4.0 * (0.055f64).cos());
    assert!(branch_energy(0.0, Branch::Lower, &p).is_some());
}
