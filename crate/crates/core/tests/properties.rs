use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

use stepfact::identities::{verify_duplication, IdentityReport};
use stepfact::interpolation::{k_by_quadrature, log_value_at, theta_half};
use stepfact::quadrature::reduction_check;
use stepfact::FormKind;

fn form() -> impl Strategy<Value = FormKind> {
    prop_oneof![Just(FormKind::Gamma), Just(FormKind::Delta), Just(FormKind::Theta)]
}

fn param() -> impl Strategy<Value = f64> {
    (-2.0_f64..2.5).prop_map(|e| e.exp())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_index_matches_gamma_ratio(form in form(), a in param(), b in param(), x in 0.05_f64..30.0) {
        let seq = form.sequence(a, b).unwrap();
        let c = seq.start() / seq.step();
        let oracle = x * seq.step().ln() + ln_gamma(c + x) - ln_gamma(c);
        let v = log_value_at(form, a, b, x).unwrap();
        prop_assert!((v - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "{} vs {}", v, oracle);
    }

    #[test]
    fn functional_equation(form in form(), a in param(), b in param(), x in 0.1_f64..20.0) {
        let seq = form.sequence(a, b).unwrap();
        let lhs = log_value_at(form, a, b, x + 1.0).unwrap();
        let rhs = log_value_at(form, a, b, x).unwrap() + seq.term(x).ln();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn duplication_holds(a in 0.1_f64..10.0, b in 0.1_f64..10.0, n in 0u64..=100) {
        let r = verify_duplication(a, b, n);
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn reduction_identity(a in param(), b in param()) {
        let r = reduction_check(a, b, 1e-11);
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn half_index_product(a in param(), b in param()) {
        let k = k_by_quadrature(a, b, 1e-11).unwrap();
        let t = theta_half(a, b).unwrap();
        prop_assert!((k * t - a).abs() <= 1e-9 * a);
    }

    #[test]
    fn reports_round_trip_through_json(lhs in -1e3_f64..1e3, rhs in -1e3_f64..1e3, tol in 1e-14_f64..1e-2) {
        let r = IdentityReport::compare("x", lhs, rhs, tol).with_meta("a", 1.5);
        let back: IdentityReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
