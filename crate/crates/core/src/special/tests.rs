use std::f64::consts::{PI, SQRT_2};

use super::*;
use crate::error::Error;
use crate::fock::{hermite_polynomials, FockConfig, GaussHermite};

/// Adaptive Simpson quadrature, test-only.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[test]
fn dawson_at_one_matches_quadrature_oracle() {
    let integral = adaptive_simpson(&|t: f64| (t * t).exp(), 0.0, 1.0, 1e-15);
    let oracle = (-1.0f64).exp() * integral;
    assert!((oracle - 0.5380795069).abs() < 1e-9);
    assert!((dawson(1.0) - oracle).abs() < 1e-12);
    assert!((dawson(1.0) - 0.5380795069).abs() < 1e-9);
    assert!((dawson(-1.0) + 0.5380795069).abs() < 1e-9);
    assert_eq!(dawson(0.0), 0.0);
}

#[test]
fn dawson_is_odd_and_solves_its_ode() {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    for _ in 0..1000 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let x = -10.0 + 20.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
        assert!((dawson(x) + dawson(-x)).abs() <= 1e-14);
        let residual = dawson_derivative(1, x) - (1.0 - 2.0 * x * dawson(x));
        assert!(residual.abs() <= 1e-11);
    }
}

#[test]
fn methods_agree_in_overlap_bands() {
    for i in 0..=400 {
        let x = 0.8 + 0.4 * i as f64 / 400.0;
        let d = (dawson_maclaurin(x) - dawson_core(x)).abs();
        assert!(d <= 1e-12, "x={x} diff={d:e}");
        let x = 5.5 + i as f64 / 400.0;
        let d = (dawson_core(x) - dawson_asymptotic(x)).abs();
        assert!(d <= 1e-12, "x={x} diff={d:e}");
    }
}

#[test]
fn evaluator_switches_at_its_radii() {
    let e = DawsonEvaluator::default();
    assert_eq!(e.method_for(0.99), DawsonMethod::Maclaurin);
    assert_eq!(e.method_for(-1.0), DawsonMethod::Core);
    assert_eq!(e.method_for(6.0), DawsonMethod::Asymptotic);
    assert!(DawsonEvaluator::new(2.0, 6.0, 10).is_err());
    assert!(DawsonEvaluator::new(1.0, 6.0, 500).is_err());
}

#[test]
fn low_order_derivatives_at_origin() {
    assert_eq!(dawson_derivative(1, 0.0), 1.0);
    assert_eq!(dawson_derivative(2, 0.0), 0.0);
    // x³ coefficient of the series is −2/3, so the third derivative is −2/3·3! = −4.
    assert!((dawson_derivative(3, 0.0) + 4.0).abs() < 1e-14);
}

#[test]
fn derivative_order_overflow() {
    let e = DawsonEvaluator::default();
    assert!(matches!(
        e.derivative(MAX_DERIVATIVE_ORDER + 1, 0.3),
        Err(Error::DerivativeOrderOverflow { .. })
    ));
    assert!(pattern_function(MAX_DERIVATIVE_ORDER, 0.0).is_err());
}

#[test]
fn ladder_certified_against_series_to_order_thirty() {
    let cert = DawsonEvaluator::default().certify_ladder(40, 3.0, 121).unwrap();
    assert!(cert.certified_order >= 30, "{:?}", cert.errors);
}

#[test]
fn pattern_function_values_and_parity() {
    assert_eq!(pattern_function(0, 0.0).unwrap(), 2.0);
    assert_eq!(pattern_function(1, 0.0).unwrap(), 0.0);
    for m in 0..12 {
        for x in [0.4, 1.7, 3.3, 7.5] {
            let a = pattern_function(m, x).unwrap();
            let b = pattern_function(m, -x).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * b).abs() <= 1e-12 * derivative_scale(m + 1), "m={m} x={x}");
        }
    }
}

#[test]
fn pattern_function_tail_follows_asymptotics() {
    // f = 2·daw′ ~ −1/x² − 3/(2x⁴) − 15/(4x⁶) − …
    for x in [8.0f64, -8.0, 12.0, 30.0] {
        let x2 = x * x;
        let tail = -(1.0 / x2 + 1.5 / (x2 * x2) + 3.75 / (x2 * x2 * x2) + 13.125 / x2.powi(4));
        let f = pattern_function(0, x).unwrap();
        assert!((f - tail).abs() < 1.5 * 59.0625 / x2.powi(5), "x={x} f={f} tail={tail}");
    }
}

#[test]
fn pattern_set_bounds() {
    let set = PatternFunctionSet::new(&[0, 1, 4], 64).unwrap();
    assert!((set.bound(0).unwrap() - 2.0).abs() < 1e-12);
    assert!(set.bound(4).unwrap().is_finite());
    assert!(set.bound(2).is_none());
    assert!(set.evaluate(2, 0.0).is_err());
    assert!((set.evaluate(0, 0.0).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn hermite_series_examples() {
    assert_eq!(hermite_series_f(0.0, 1).unwrap(), 1.0);
    assert!((hermite_series_f(0.0, 40).unwrap() - 2.0).abs() <= 1e-10);
    let d = hermite_series_f(1.5, 60).unwrap() - pattern_function(0, 1.5).unwrap();
    assert!(d.abs() <= 1e-8);
    assert!(hermite_series_f(1.0, 0).is_err());
}

#[test]
fn hermite_series_matches_pattern_function_on_interval() {
    let sup = (0..=800)
        .map(|i| -4.0 + 8.0 * i as f64 / 800.0)
        .map(|x| (hermite_series_f(x, 80).unwrap() - pattern_function(0, x).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(sup <= 1e-8, "sup {sup:e}");
}

#[test]
fn differentiated_series_converge_uniformly() {
    for m in 0..=6 {
        for i in 0..=160 {
            let x = -4.0 + 8.0 * i as f64 / 160.0;
            let a = differentiated_series(m, x, 80).unwrap();
            let b = differentiated_series(m, x, 160).unwrap();
            assert!((a - b).abs() <= 1e-8, "m={m} x={x}");
            let truth = dawson_derivative(m + 1, x);
            assert!((b - truth).abs() <= 1e-8 * derivative_scale(m + 1), "m={m} x={x}");
        }
    }
}

#[test]
fn hermite_product_integral_values() {
    assert!((hermite_product_integral(0, 0).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert!((hermite_product_integral(1, 1).unwrap() - 8.0 * PI.sqrt()).abs() < 1e-12);
    let rule = GaussHermite::new(16);
    let oracle: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&t, w)| {
            let h = hermite_polynomials(4, t);
            w * h[4] * h[3] * h[3]
        })
        .sum();
    let v = hermite_product_integral(2, 3).unwrap();
    assert!((v - oracle).abs() <= 1e-9 * oracle.abs(), "{v} vs {oracle}");
    assert!(matches!(hermite_product_integral(3, 2), Err(Error::Domain(_))));
}

#[test]
fn closed_form_matrix_elements() {
    assert!((pattern_system_entry(1, 0, 0).unwrap() + SQRT_2).abs() < 1e-14);
    assert!((pattern_system_entry(0, 1, 1).unwrap() - 2.0).abs() < 1e-14);
    for k in 0..8 {
        for l in 0..5 {
            let v = pattern_system_entry(k, l, l).unwrap();
            let c = diagonal_closed_form(k, l);
            assert!((v - c).abs() <= 1e-13 * c.abs());
            for n in l + 1..l + 4 {
                assert_eq!(pattern_system_entry(k, l, n).unwrap(), 0.0);
            }
        }
    }
    assert!(pattern_system_entry(MAX_DERIVATIVE_ORDER, 0, 0).is_err());
}

#[test]
fn closed_form_agrees_with_quadrature() {
    let cfg = FockConfig::new(12).unwrap();
    for j in 0..=6 {
        for m in 0..8 {
            for n in 0..=m {
                let exact = pattern_matrix_element(j, m, n);
                let quad = crate::fock::matrix_element(
                    |x| pattern_function(j, x).unwrap(),
                    m,
                    n,
                    &cfg,
                )
                .unwrap();
                assert!((exact - quad).abs() <= 1e-9 * derivative_scale(j + 1), "j={j} m={m} n={n}");
                assert_eq!(exact, pattern_matrix_element(j, n, m));
            }
        }
    }
    // A sub-diagonal entry with no simple closed form, reproduced at two orders.
    let v = pattern_system_entry_quadrature(1, 2, 0, &cfg).unwrap();
    assert!(v.is_finite());
    assert!((v - pattern_system_entry(1, 2, 0).unwrap()).abs() < 1e-9);
}

#[test]
fn kronecker_property_by_quadrature() {
    let cfg = FockConfig::new(26).unwrap();
    for n in 0..=25 {
        let v = crate::fock::matrix_element(|x| pattern_function(0, x).unwrap(), n, n, &cfg).unwrap();
        let want = if n == 0 { 1.0 } else { 0.0 };
        assert!((v - want).abs() <= 1e-8, "n={n} v={v}");
    }
}
