use std::f64::consts::PI;

use caustics_core::observables::{density_spectrum, energy, mass, sigma_norm};
use caustics_core::propagators::{evolve, free_step, nonlinear_step};
use caustics_core::spectral::{forward_dft, inverse_dft, l2_norm};
use caustics_core::wkb::{self, CausticGeometry, InitialProfile, PhaseKind};
use caustics_core::{GridSpec, RunConfig, SemiclassicalParams, SplitScheme, WaveField};
use num_complex::Complex64;
use proptest::prelude::*;

fn field_strategy(n: usize) -> impl Strategy<Value = WaveField> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_map(move |v| {
        let grid = GridSpec::periodic_2pi(n).unwrap();
        WaveField::new(grid, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

/// Smooth localized data: a few Gaussian bumps with random phases.
fn smooth_strategy(n: usize) -> impl Strategy<Value = WaveField> {
    prop::collection::vec((1.0..3.0f64, 2.0..10.0f64, -3.0..3.0f64, -5i32..5), 1..4).prop_map(move |bumps| {
        let grid = GridSpec::periodic_2pi(n).unwrap();
        WaveField::from_fn(grid, |x| {
            bumps
                .iter()
                .map(|&(c, w, ph, k)| {
                    Complex64::from_polar((-w * (x - c - 1.5).powi(2)).exp(), ph + k as f64 * x)
                })
                .sum()
        })
    })
}

fn max_diff(a: &WaveField, b: &WaveField) -> f64 {
    a.sub(b).unwrap().sup_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(u in field_strategy(64)) {
        let spec = forward_dft(&u);
        let lhs: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * u.grid().length();
        let rhs = l2_norm(&u).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn dft_round_trips(u in field_strategy(128)) {
        let scale = u.sup_norm().max(1e-300);
        prop_assert!(max_diff(&inverse_dft(&forward_dft(&u)), &u) <= 1e-12 * scale * 10.0);
        let spec = forward_dft(&u);
        let again = forward_dft(&inverse_dft(&spec));
        let err = spec.coeffs().iter().zip(again.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn single_modes(m in -200i64..200) {
        let n = 32usize;
        let grid = GridSpec::periodic_2pi(n).unwrap();
        let u = WaveField::from_fn(grid, |x| Complex64::cis(m as f64 * x));
        let spec = forward_dft(&u);
        let target = (m + 16).rem_euclid(32) - 16;
        for (k, c) in spec.iter() {
            let expect = if k == target { 1.0 } else { 0.0 };
            prop_assert!((c - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn free_step_reverses_and_composes(u in field_strategy(64), t in -5.0..5.0f64, s in -5.0..5.0f64, eps in 0.001..1.0f64) {
        let back = free_step(&free_step(&u, t, eps), -t, eps);
        prop_assert!(max_diff(&back, &u) <= 1e-12);
        let two = free_step(&free_step(&u, t, eps), s, eps);
        let one = free_step(&u, t + s, eps);
        prop_assert!(max_diff(&two, &one) <= 1e-11);
        prop_assert!((l2_norm(&free_step(&u, t, eps)) - l2_norm(&u)).abs() <= 1e-12 * l2_norm(&u).max(1.0));
    }

    #[test]
    fn nonlinear_step_keeps_modulus(u in field_strategy(32), t in -3.0..3.0f64, sigma in 0.5..4.0f64, lambda in -5.0..5.0f64) {
        let p = SemiclassicalParams::new(0.1, sigma, 1.5, lambda).unwrap();
        let v = nonlinear_step(&u, t, &p);
        for (a, b) in u.values().iter().zip(v.values()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-14);
        }
    }

    #[test]
    fn splitting_conserves_mass(
        u in smooth_strategy(128),
        lambda in 0.0..3.0f64,
        sigma in 1.0..3.0f64,
        steps in 1usize..60,
        lie in any::<bool>(),
    ) {
        let p = SemiclassicalParams::new(0.05, sigma, 2.0, lambda).unwrap();
        let scheme = if lie { SplitScheme::Lie } else { SplitScheme::Strang };
        let dt = 0.01;
        let cfg = RunConfig::new(p, scheme, dt * steps as f64, dt).unwrap();
        let out = evolve(&u, &cfg).unwrap();
        prop_assert!(((mass(&out) - mass(&u)) / mass(&u)).abs() <= 1e-10);
    }

    #[test]
    fn linear_splitting_is_free_flow(u in smooth_strategy(64), steps in 1usize..40, lie in any::<bool>()) {
        let p = SemiclassicalParams::new(0.1, 2.0, 2.0, 0.0).unwrap();
        let scheme = if lie { SplitScheme::Lie } else { SplitScheme::Strang };
        let cfg = RunConfig::new(p, scheme, 0.05 * steps as f64, 0.05).unwrap();
        prop_assert!(max_diff(&evolve(&u, &cfg).unwrap(), &free_step(&u, 0.05 * steps as f64, 0.1)) <= 1e-11);
    }

    #[test]
    fn observable_inequalities(u in field_strategy(64), lambda in 0.0..5.0f64, sigma in 0.5..4.0f64) {
        let p = SemiclassicalParams::new(0.2, sigma, 1.0, lambda).unwrap();
        prop_assert!(energy(&u, &p) >= 0.0);
        prop_assert!(sigma_norm(&u, PI) >= l2_norm(&u));
        let s = density_spectrum(&u);
        for k in 1..32i64 {
            prop_assert!((s.get(-k) - s.get(k).conj()).norm() <= 1e-12);
        }
    }

    #[test]
    fn wkb_amplitude_keeps_mass(t in prop_oneof![-2.0..0.9f64, 1.1..4.0f64]) {
        // ∫|a(t,x)|² dx over the whole line, by a fine rectangle rule
        let profile = InitialProfile::new(|y| Complex64::new((-2.0 * y * y).exp(), 0.0), PhaseKind::Quadratic, 0.0);
        let half_width = 12.0 * (1.0 - t).abs().max(1.0);
        let n = 40_000;
        let h = 2.0 * half_width / n as f64;
        let integral: f64 = (0..n)
            .map(|j| {
                let x = -half_width + j as f64 * h;
                wkb::quadratic_wkb(t, x, &profile, 1).unwrap().1.norm_sqr()
            })
            .sum::<f64>() * h;
        let exact = (PI / 4.0).sqrt();
        prop_assert!((integral - exact).abs() <= 1e-8);
    }

    #[test]
    fn wkb_modulus_symmetry(s in 0.06..0.9f64, x in -2.0..2.0f64) {
        let profile = InitialProfile::focal_gaussian();
        let c = profile.center;
        let before = wkb::quadratic_wkb(1.0 - s, c + x, &profile, 1).unwrap().1.norm();
        let after = wkb::quadratic_wkb(1.0 + s, c - x, &profile, 1).unwrap().1.norm();
        prop_assert!((before - after).abs() <= 1e-14 * before.max(1.0));
    }

    #[test]
    fn regime_boundary(sigma in 0.2..6.0f64, delta in 1e-6..1.0f64, cusp in any::<bool>()) {
        let geom = if cusp { CausticGeometry::Cusp1D } else { CausticGeometry::FocalPoint };
        let ac = wkb::criticality_index(geom, 1, sigma).unwrap();
        prop_assume!(ac >= 1.0);
        prop_assert!(wkb::classify_regime(ac + delta, geom, 1, sigma).unwrap().is_linear_caustic());
        prop_assert!(wkb::classify_regime(ac, geom, 1, sigma).unwrap().is_nonlinear_caustic());
        let bigger = wkb::criticality_index(geom, 1, sigma + delta).unwrap();
        prop_assert!(bigger > ac);
    }

    #[test]
    fn cusp_membership_symmetric(t in 0.5..3.0f64, x in -6.0..6.0f64) {
        prop_assert_eq!(
            wkb::cusp_caustic_contains(t, x, 1e-3),
            wkb::cusp_caustic_contains(t, -x, 1e-3)
        );
    }
}
