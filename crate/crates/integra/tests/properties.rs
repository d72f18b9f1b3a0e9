//! Property tests across the public surface: expression round trips,
//! tolerance monotonicity, sampling determinism and kernel recurrences.

use std::collections::BTreeMap;

use integra::identity_catalog::{builtin_catalog, load_catalog, lookup, serialize_catalog, Constant, Expr, Func};
use integra::series_engine::{log_power_kernel, LogWeight};
use integra::verifier::{verify_identity, verify_identity_sampled, Status, TolerancePolicy};
use integra::{AccuracyPolicy, Complex64 as C64};
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-1e6f64..1e6).prop_map(Expr::Num),
        (-20i32..20).prop_map(|n| Expr::Num(f64::from(n))),
        (1e-9f64..1e-3).prop_map(Expr::Num),
        prop_oneof![Just(Constant::Pi), Just(Constant::EulerGamma), Just(Constant::Catalan)].prop_map(Expr::Const),
        prop_oneof![Just("p"), Just("q"), Just("s")].prop_map(Expr::var),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let binary = prop_oneof![Just(Func::Add), Just(Func::Sub), Just(Func::Mul), Just(Func::Div), Just(Func::Pow)];
        let unary = prop_oneof![Just(Func::Neg), Just(Func::Exp), Just(Func::Log), Just(Func::Sin), Just(Func::Gamma)];
        prop_oneof![
            (binary, inner.clone(), inner.clone()).prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
            (unary, inner).prop_map(|(f, a)| Expr::Call(f, vec![a])),
        ]
    })
}

/// A record whose closed form is 1/p scaled by (1 + eps).
fn perturbed_record() -> integra::identity_catalog::IdentityRecord {
    load_catalog(
        "id: T-PERTURBED\nsource: test\nlhs: pow(x, sub(p, 1)); interval(1)\n\
         rhs_closed: mul(div(1, p), add(1, eps))\nconstraints: re(p) in [0.5, 3.0]\ndefaults: eps=0, p=2\n",
    )
    .unwrap()
    .remove(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expressions_survive_printing_and_parsing(e in expr_strategy()) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn loosening_the_tolerance_never_turns_a_pass_into_a_fail(
        eps_exp in -13.0f64..-1.0,
        p in 0.5f64..3.0,
        tight_exp in -12.0f64..-2.0,
        widen in 1.0f64..1e4,
    ) {
        let record = perturbed_record();
        let params: BTreeMap<String, C64> =
            [("eps".to_string(), c(10f64.powf(eps_exp))), ("p".to_string(), c(p))].into_iter().collect();
        let tight = TolerancePolicy { rtol: 10f64.powf(tight_exp), ..TolerancePolicy::default() };
        let loose = TolerancePolicy { rtol: tight.rtol * widen, atol: tight.atol * widen, ..tight };
        let a = verify_identity(&record, Some(&params), &tight).unwrap();
        let b = verify_identity(&record, Some(&params), &loose).unwrap();
        prop_assert_eq!(a.rel_err, b.rel_err);
        if a.status == Status::Pass {
            prop_assert_eq!(&b.status, &Status::Pass);
        }
        if b.status == Status::Fail {
            prop_assert_eq!(&a.status, &Status::Fail);
        }
    }

    #[test]
    fn sampled_verification_is_a_function_of_the_seed(seed in any::<u64>(), n in 1usize..4) {
        let catalog = builtin_catalog();
        let record = lookup(&catalog, "PAPER-BETA").unwrap();
        let policy = TolerancePolicy::default();
        let a = verify_identity_sampled(record, n, seed, &policy).unwrap();
        let b = verify_identity_sampled(record, n, seed, &policy).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), n);
        for r in &a {
            prop_assert!(record.check_constraints(&r.params).is_ok());
            prop_assert_eq!(&r.status, &Status::Pass);
        }
    }

    #[test]
    fn records_with_arbitrary_defaults_round_trip(p in 0.5f64..3.0, q in 0.5f64..3.0) {
        let text = format!(
            "id: T-RT\nsource: test record\nlhs: pow(x, sub(p, 1)) * binom(-1, 1, sub(q, 1)); interval(1)\n\
             rhs_closed: beta(p, q)\nconstraints: re(p) in [0.5, 3.0]; re(q) in [0.5, 3.0]\ndefaults: p={p:?}, q={q:?}\n"
        );
        let records = load_catalog(&text).unwrap();
        let again = load_catalog(&serialize_catalog(&records)).unwrap();
        prop_assert_eq!(&records, &again);
        prop_assert_eq!(again[0].default_params["p"], c(p));
    }

    #[test]
    fn kernel_steps_in_k_by_gamma_recurrence(p in 0.2f64..4.0, k in 0.0f64..4.0, a in 0.3f64..1.0) {
        // K(p; k+1) = (k+1)/p K(p; k) for the full interval of a with b = 1/a
        let policy = AccuracyPolicy::default();
        let upper = c(1.0 / a);
        let lo = log_power_kernel(c(p), c(k), c(a), upper, LogWeight::Power, &policy).unwrap();
        let hi = log_power_kernel(c(p), c(k + 1.0), c(a), upper, LogWeight::Power, &policy).unwrap();
        let expected = lo * (k + 1.0) / p;
        prop_assert!((hi - expected).norm() <= 1e-12 * expected.norm(), "{} vs {}", hi, expected);
    }
}
