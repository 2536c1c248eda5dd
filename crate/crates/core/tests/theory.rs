//! Doublon bands and channel propagators against quadrature.

use std::f64::consts::PI;

use doublon::model::{Boundary, WaveguideParams};
use doublon::reduced::spbs_length;
use doublon::theory::{
    branch_energy, correlation_length, correlation_length_k0, dispersion_det, fit_alpha, green_f, solve_bands, Branch,
    Channel, K0,
};
use proptest::prelude::*;

mod common;
use common::integrate;

fn baseline() -> WaveguideParams {
    WaveguideParams::new(1.0, 4.0, 0.2, 60, Boundary::Periodic).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn green_closed_form_matches_quadrature(
        k in 0.0f64..PI,
        sin in any::<bool>(),
        above in any::<bool>(),
        gap in 0.2f64..6.0,
        r in -6i64..=6,
    ) {
        let p = baseline();
        let ch = if sin { Channel::Sin } else { Channel::Cos };
        let c = ch.coefficient(k, p.j);
        let e = if above { c.abs() + gap } else { -c.abs() - gap };
        let closed = green_f(k, e, r, ch, &p).unwrap();
        // below ~1e-6 of f(0) a double-precision quadrature cannot resolve 1e-9 relative
        prop_assume!(closed.abs() > 1e-6 * green_f(k, e, 0, ch, &p).unwrap().abs());
        // the imaginary part cancels between q and -q
        let quad = integrate(|q| (q * r as f64).cos() / (e + c * q.cos()), -PI, PI, 1e-15);
        prop_assert!((closed - quad).abs() <= 1e-9 * closed.abs(), "closed {closed} quad {quad}");
    }

    #[test]
    fn band_roots_zero_the_determinant(k in 0.0f64..PI, u_c in 0.5f64..8.0, u_m in 0.0f64..1.5) {
        let p = WaveguideParams::new(1.0, u_c, u_m, 60, Boundary::Periodic).unwrap();
        for br in [Branch::Lower, Branch::Upper] {
            if let Some(e) = branch_energy(k, br, &p) {
                prop_assert!(dispersion_det(k, e, &p).unwrap().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn gapped_bands_sit_below_continuum(u_m in 0.0f64..1.5, excess in 0.01f64..3.0) {
        let p = WaveguideParams::new(1.0, 4.0 + u_m + excess, u_m, 60, Boundary::Periodic).unwrap();
        let grid: Vec<f64> = (0..=100).map(|i| PI * i as f64 / 100.0).collect();
        let bands = solve_bands(&p, &grid).unwrap();
        let top = bands.e_plus.iter().chain(&bands.e_minus).flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        prop_assert!(top < -4.0, "top {top}");
    }
}

#[test]
fn alpha_stable_under_half_window() {
    let p = baseline();
    let a = fit_alpha(&p, 0.05, 21).unwrap().alpha;
    let half = fit_alpha(&p, 0.025, 21).unwrap().alpha;
    assert!((a - half).abs() / a < 0.05, "{a} vs {half}");
    assert!((a - 2.0).abs() < 0.1);
}

#[test]
fn spbs_length_matches_quadrature() {
    for omega in [-2.5102, -2.3, -3.0, 2.7] {
        let psi = |n: f64| integrate(|k| (k * n).cos() / (omega + 2.0 * k.cos()), -PI, PI, 1e-15);
        let from_quad = -1.0 / (psi(4.0) / psi(3.0)).abs().ln();
        let closed = spbs_length(omega, 1.0).unwrap();
        assert!((from_quad - closed).abs() < 1e-8 * closed, "omega {omega}: {from_quad} vs {closed}");
    }
}

#[test]
fn k0_length_agrees_with_general_form() {
    let p = baseline();
    let e = branch_energy(K0, Branch::Lower, &p).unwrap();
    let general = correlation_length(K0, e, &p).unwrap();
    assert!((general - correlation_length_k0(e, p.j)).abs() < 1e-12);
    assert!((general - 0.8433).abs() < 1e-3);
}
