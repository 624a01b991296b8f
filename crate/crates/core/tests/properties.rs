use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use divres::analytic::{eval_f, eval_f_prime, eval_logderiv};
use divres::batch::{scan_sequential, ScanRow};
use divres::contour::{build_contour, default_epsilon, validate_epsilon};
use divres::divisor::{evaluate_components, tau_with};
use divres::oracle;
use divres::residue::{residue_quadrature, residue_winding, winding_angle};
use divres::{ContourKind, EvalOptions, Natural, QuadratureConfig};

fn nat(v: u64) -> Natural {
    Natural::new(v).unwrap()
}

/// Direct `exp(2πiz) + exp(2πis/z) − 2`, fine away from the real axis zeros.
fn naive_f(s: f64, z: Complex64) -> Complex64 {
    let i2pi = Complex64::new(0.0, TAU);
    (i2pi * z).exp() + (i2pi * s / z).exp() - 2.0
}

/// Keeps `2πs|y|/|z|²` below 2π so `exp(2πis/z)` stays representable.
fn height(s: u64, x: f64, cap: f64) -> f64 {
    cap.min(x * x / s as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_finite_difference(s in 1u64..2_000, x in 1.0f64..40.0, t in -1.0f64..1.0) {
        let n = nat(s);
        let z = Complex64::new(x, t * height(s, x, 0.2));
        let h = 1e-6;
        let fd = (naive_f(s as f64, z + h) - naive_f(s as f64, z - h)) / (2.0 * h);
        let d = eval_f_prime(n, z).unwrap();
        let scale = d.norm().max(1.0);
        prop_assert!((d - fd).norm() / scale < 1e-4, "f' = {d}, fd = {fd}");
    }

    #[test]
    fn f_matches_direct_formula(s in 1u64..5_000, x in 0.5f64..80.0, t in -1.0f64..1.0) {
        let z = Complex64::new(x, t * height(s, x, 0.3));
        let v = eval_f(nat(s), z).unwrap();
        let naive = naive_f(s as f64, z);
        // the direct formula loses about |s/z| ulps in its phase
        let tol = 1e-12 * (1.0 + s as f64 / z.norm()) * (naive.norm() + 4.0);
        prop_assert!((v - naive).norm() < tol, "{v} vs {naive}");
    }

    #[test]
    fn logderiv_is_ratio_of_derivative_and_value(s in 1u64..5_000, x in 1.0f64..50.0, t in 0.05f64..1.0) {
        let n = nat(s);
        let z = Complex64::new(x, t * height(s, x, 0.3));
        let ld = eval_logderiv(n, z, 1e-300).unwrap();
        let ratio = eval_f_prime(n, z).unwrap() / (Complex64::new(0.0, TAU) * eval_f(n, z).unwrap());
        prop_assert!((ld - ratio).norm() <= 1e-9 * ratio.norm().max(1.0));
    }

    #[test]
    fn divisors_are_zeros(s in 1u64..1_000_000) {
        let n = nat(s);
        for d in oracle::divisors(s).divisors {
            prop_assert!(eval_f(n, Complex64::new(d as f64, 0.0)).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn contours_are_closed_positive_rectangles(s in 2u64..10_000, kind_ix in 0usize..3) {
        let n = nat(s);
        let eps = default_epsilon(n);
        let c = build_contour(ContourKind::ALL[kind_ix], n, eps).unwrap();
        prop_assert!(c.is_closed());
        prop_assert!(c.signed_area() > 0.0);
        let (lo, hi) = c.x_range();
        prop_assert!((c.signed_area() - 2.0 * eps * (hi - lo)).abs() <= 1e-9 * c.signed_area().max(1.0));
        prop_assert!((c.perimeter() - 2.0 * (hi - lo) - 4.0 * eps).abs() < 1e-9 * c.perimeter());
    }

    #[test]
    fn plus_spans_minus_and_center(s in 2u64..10_000) {
        let n = nat(s);
        let eps = default_epsilon(n);
        let m = build_contour(ContourKind::Minus, n, eps).unwrap().x_range();
        let c = build_contour(ContourKind::Center, n, eps).unwrap().x_range();
        let p = build_contour(ContourKind::Plus, n, eps).unwrap().x_range();
        prop_assert_eq!(m.1, c.0);
        prop_assert_eq!(p, (m.0, c.1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn components_are_additive_and_match_oracle(s in 2u64..2_000) {
        let e = evaluate_components(nat(s), &EvalOptions::default()).unwrap();
        let c = e.components;
        prop_assert_eq!(c.tau_plus, c.tau_minus + c.tau_center);
        prop_assert_eq!(c, oracle::predicted_components(s));
        prop_assert_eq!(e.retries, 0);
    }

    #[test]
    fn winding_angle_is_whole_turns(s in 2u64..1_000, kind_ix in 0usize..3) {
        let n = nat(s);
        let c = build_contour(ContourKind::ALL[kind_ix], n, default_epsilon(n)).unwrap();
        let w = winding_angle(n, &c, &QuadratureConfig::default()).unwrap();
        let turns = w.angle / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9, "{turns}");
    }

    #[test]
    fn engines_agree(s in 2u64..1_000, kind_ix in 0usize..3) {
        let n = nat(s);
        let cfg = QuadratureConfig::default();
        let c = build_contour(ContourKind::ALL[kind_ix], n, default_epsilon(n)).unwrap();
        let q = residue_quadrature(n, &c, &cfg).unwrap();
        let w = residue_winding(n, &c, &cfg).unwrap();
        prop_assert_eq!(q.rounded, w.rounded);
        // the 1e-6 tolerance is per panel budget, summed over four edges
        prop_assert!(q.residual < 1e-4, "quadrature residual {}", q.residual);
        prop_assert!(w.residual < 1e-9, "winding residual {}", w.residual);
    }

    #[test]
    fn validation_accepts_default_contours(s in 2u64..3_000) {
        let n = nat(s);
        for kind in ContourKind::ALL {
            let c = build_contour(kind, n, default_epsilon(n)).unwrap();
            prop_assert!(validate_epsilon(n, &c, 64).unwrap().accepted);
        }
    }

    #[test]
    fn scan_rows_are_ordered_and_correct(start in 1u64..300, len in 0u64..12) {
        let rows: Vec<ScanRow> = scan_sequential(start, start + len, &EvalOptions::default()).unwrap();
        prop_assert_eq!(rows.len() as u64, len + 1);
        for (i, r) in rows.iter().enumerate() {
            prop_assert_eq!(r.s, start + i as u64);
            prop_assert!(r.matches);
            prop_assert_eq!(r.prime_residue, Some(r.prime_trial));
        }
    }
}

#[test]
fn tau_agrees_with_trial_division_at_scattered_sizes() {
    for s in [720u64, 1024, 2310, 4999, 5040] {
        let r = tau_with(nat(s), &EvalOptions::default()).unwrap();
        assert_eq!(r.tau, oracle::sigma0(s), "s = {s}");
    }
}

#[test]
fn second_derivative_at_root_closed_form() {
    for r in [1u64, 7, 31, 100] {
        let got = divres::analytic::second_derivative_at_root(nat(r * r));
        assert_relative_eq!(got.re, -8.0 * PI * PI, max_relative = 1e-12);
        assert_relative_eq!(got.im, 4.0 * PI / r as f64, max_relative = 1e-12);
    }
}
