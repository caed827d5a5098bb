//! Cross-checks against independent closed forms built on the classical Gamma
//! function (statrs) and on the Gauss-type limit product.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use stepfact::eulermaclaurin::{constants_abc, extract_constant, log_interpolated, DEFAULT_MAX_ORDER};
use stepfact::identities::log_grid;
use stepfact::interpolation::{gamma_half, gauss_limit_oracle, half_shifted_delta, value_at};
use stepfact::stepproducts::{shift_ratio, StepSequence};
use stepfact::FormKind;

fn grid() -> Vec<(f64, f64)> {
    let axis = log_grid(0.25, 8.0, 6);
    axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect()
}

/// `log prod_{m<x} (s + m d) = x log d + lnGamma(c + x) - lnGamma(c)`, `c = s/d`.
fn log_product_oracle(s: f64, d: f64, x: f64) -> f64 {
    let c = s / d;
    x * d.ln() + ln_gamma(c + x) - ln_gamma(c)
}

/// Log constant from Stirling's formula for `lnGamma(c + x)`.
fn log_constant_oracle(s: f64, d: f64) -> f64 {
    let c = s / d;
    0.5 * (2.0 * PI).ln() + 1.0 - c - (c - 0.5) * d.ln() - ln_gamma(c)
}

#[test]
fn extracted_constants_match_stirling() {
    for (a, b) in grid() {
        for form in FormKind::ALL {
            let seq = form.sequence(a, b).unwrap();
            let est = extract_constant(&seq, 40, DEFAULT_MAX_ORDER).unwrap();
            let oracle = log_constant_oracle(seq.start(), seq.step());
            assert!(
                (est.log_constant - oracle).abs() < 1e-11 * oracle.abs().max(1.0),
                "{form} a={a} b={b}: {} vs {oracle}",
                est.log_constant
            );
        }
    }
}

#[test]
fn constants_at_unit_parameters() {
    let c = constants_abc(1.0_f64, 1.0).unwrap();
    assert!((c.a_const() - (2.0 * PI).sqrt()).abs() < 1e-12);
    assert!((c.b_const() - (2.0 * std::f64::consts::E).sqrt()).abs() < 1e-12);
    assert!((c.c_const() - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn interpolated_values_match_gamma_ratio() {
    for (a, b) in grid() {
        for form in FormKind::ALL {
            let seq = form.sequence(a, b).unwrap();
            for &x in &[0.1, 0.5, 1.25, 3.7, 12.5, 60.0] {
                let v = log_interpolated(&seq, x, DEFAULT_MAX_ORDER).unwrap();
                let o = log_product_oracle(seq.start(), seq.step(), x);
                assert!((v - o).abs() < 1e-11 * o.abs().max(1.0), "{form} a={a} b={b} x={x}: {v} vs {o}");
            }
        }
    }
}

#[test]
fn gauss_limit_agrees_within_ten_over_n() {
    let big_n = 100_000;
    for (a, b) in grid() {
        for form in FormKind::ALL {
            let seq = form.sequence(a, b).unwrap();
            for &x in &[0.5, 1.5, 2.3] {
                let v = value_at(form, a, b, x).unwrap();
                let g = gauss_limit_oracle(&seq, x, big_n).unwrap();
                assert!((v - g).abs() <= 10.0 / big_n as f64 * v, "{form} a={a} b={b} x={x}");
            }
        }
    }
}

#[test]
fn gamma_half_formula_against_gauss_limit() {
    // The Gamma form's half-index integral runs over sqrt(1 - x^b), not 2b.
    for &(a, b) in &[(1.0_f64, 1.0_f64), (0.3, 2.0), (5.0, 0.5), (2.5, 2.5)] {
        let q = gamma_half(a, b).unwrap();
        let seq = StepSequence::new(a, b).unwrap();
        let g = gauss_limit_oracle(&seq, 0.5, 1_000_000).unwrap();
        assert!((q - g).abs() < 1e-6 * q, "a={a} b={b}: {q} vs {g}");
        let o = log_product_oracle(a, b, 0.5).exp();
        assert!((q - o).abs() < 1e-10 * o);
    }
}

#[test]
fn half_shifted_family_against_gamma_ratio() {
    for &(a, b) in &[(1.0, 1.0), (0.25, 8.0), (8.0, 0.25), (1.3, 0.6)] {
        for n in 0..8 {
            let v = half_shifted_delta(a, b, n).unwrap();
            let o = log_product_oracle(a, 2.0 * b, n as f64 + 0.5).exp();
            assert!((v - o).abs() <= 1e-9 * o, "a={a} b={b} n={n}");
        }
    }
    let k = (2.0 / PI).sqrt();
    assert!((half_shifted_delta(1.0, 1.0, 3).unwrap() - 48.0 * k).abs() < 1e-11);
}

#[test]
fn shift_ratio_examples() {
    let seq = StepSequence::new(1.0_f64, 2.0).unwrap();
    let r: f64 = shift_ratio(&seq, 1000, 3.0, 1.0).unwrap();
    assert!((r - 1.0).abs() < 1e-2 && r != 1.0);
    assert_eq!(shift_ratio(&seq, 1000, 0.0, 1.0).unwrap(), 1.0);
    let (a, b) = (1.0, 1.0);
    let ratios: Vec<f64> = [0.0, a, a + b]
        .iter()
        .map(|&al| shift_ratio(&seq, 1_000_000, 3.0, al).unwrap())
        .collect();
    for r in &ratios {
        assert!((r - ratios[0]).abs() < 1e-5);
    }
    // exact value for the direct oracle: prod_{j<3} (1 + 2(N+j)) / (1 + 2N)^3
    let n = 1000.0_f64;
    let direct = (2.0 * n + 1.0) * (2.0 * n + 3.0) * (2.0 * n + 5.0) / (1.0 + 2.0 * n).powi(3);
    assert!((r - direct).abs() < 1e-14);
}
