use std::f64::consts::LN_2;

use super::*;
use crate::identity_catalog::{builtin_catalog, load_catalog, lookup};

fn record(id: &str) -> IdentityRecord {
    lookup(&builtin_catalog(), id).unwrap().clone()
}

fn single(text: &str) -> IdentityRecord {
    load_catalog(text).unwrap().remove(0)
}

fn params(list: &[(&str, f64)]) -> BTreeMap<String, C64> {
    list.iter().map(|(n, v)| (n.to_string(), C64::new(*v, 0.0))).collect()
}

/// Catalan's constant from Σ (-1)^k / (2k+1)^2, averaging consecutive
/// partial sums to cancel the alternating tail.
fn catalan_oracle() -> f64 {
    let n = 200_000;
    let mut s = 0.0;
    let mut prev = 0.0;
    for k in 0..n {
        prev = s;
        let d = (2 * k + 1) as f64;
        s += if k % 2 == 0 { 1.0 } else { -1.0 } / (d * d);
    }
    0.5 * (s + prev)
}

/// Euler's constant from H_n - log n with the Euler-Maclaurin correction.
fn euler_gamma_oracle() -> f64 {
    let n = 10_000u32;
    let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let n = n as f64;
    h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4))
}

/// log Γ(x) for real x > 0 from Stirling's series after shifting x past 10.
fn ln_gamma_oracle(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

#[test]
fn malmsten_integral_passes() {
    let r = verify_identity(&record("GR-4.325.1"), None, &TolerancePolicy::default()).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!((r.lhs_value.re + LN_2 * LN_2 / 2.0).abs() < 1e-12);
    assert!(r.terms_used > 0 && r.quad_evals > 0);
}

#[test]
fn catalan_family_at_s_2() {
    let r = verify_identity(&record("PAPER-3.47"), Some(&params(&[("s", 2.0)])), &TolerancePolicy::default()).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!((r.lhs_value.re - catalan_oracle() / 4.0).abs() < 1e-11);
}

#[test]
fn log_log_integral_is_minus_euler_gamma() {
    let r = verify_identity(&record("GR-4.229.1"), None, &TolerancePolicy::default()).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!((r.lhs_value.re + euler_gamma_oracle()).abs() < 1e-12);
}

#[test]
fn sampled_beta_points_pass_and_match_the_oracle() {
    let reports = verify_identity_sampled(&record("PAPER-BETA"), 5, 42, &TolerancePolicy::default()).unwrap();
    assert_eq!(reports.len(), 5);
    for r in &reports {
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let (p, q) = (r.params["p"].re, r.params["q"].re);
        assert!((0.5..=4.0).contains(&p) && (0.5..=4.0).contains(&q));
        let beta = (ln_gamma_oracle(p) + ln_gamma_oracle(q) - ln_gamma_oracle(p + q)).exp();
        assert!((r.lhs_value.re - beta).abs() < 1e-11 * beta, "{} vs {beta}", r.lhs_value);
    }
    let again = verify_identity_sampled(&record("PAPER-BETA"), 5, 42, &TolerancePolicy::default()).unwrap();
    assert_eq!(reports, again);
    let other = verify_identity_sampled(&record("PAPER-BETA"), 5, 43, &TolerancePolicy::default()).unwrap();
    assert_ne!(reports[0].params, other[0].params);
}

#[test]
fn sampling_edge_cases() {
    let policy = TolerancePolicy::default();
    assert!(verify_identity_sampled(&record("PAPER-BETA"), 0, 1, &policy).unwrap().is_empty());
    let fixed = verify_identity_sampled(&record("GR-4.325.1"), 7, 1, &policy).unwrap();
    assert_eq!(fixed.len(), 1);
    assert!(fixed[0].params.is_empty());
}

#[test]
fn integer_parameters_are_sampled_as_integers() {
    for r in verify_identity_sampled(&record("NAHIN-4.2.6"), 6, 3, &TolerancePolicy::default()).unwrap() {
        let n = r.params["n"];
        assert_eq!(n.re.fract(), 0.0);
        assert!((1.0..=6.0).contains(&n.re));
        assert_eq!(r.status, Status::Pass);
    }
}

#[test]
fn constraint_violations_are_errors_not_reports() {
    let policy = TolerancePolicy::default();
    let r = verify_identity(&record("PAPER-BETA"), Some(&params(&[("p", -1.0)])), &policy);
    assert!(matches!(r, Err(Error::ConstraintViolation(_))));
    let r = verify_identity(&record("PAPER-BETA"), Some(&params(&[("zz", 1.0)])), &policy);
    assert!(matches!(r, Err(Error::ConstraintViolation(_))));
}

#[test]
fn evaluation_errors_become_error_status() {
    let r = single(
        "id: T-ERR\nsource: test\nlhs: pow(x, sub(p, 1)); interval(1)\n\
         rhs_closed: gamma(sub(p, 1))\nconstraints: none\ndefaults: p=1\n",
    );
    let report = verify_identity(&r, None, &TolerancePolicy::default()).unwrap();
    match &report.status {
        Status::Error(m) => assert!(m.starts_with("T-ERR: rhs_closed")),
        other => panic!("{other}"),
    }
    assert!(report.status.to_string().starts_with("error(T-ERR"));
}

#[test]
fn wrong_closed_form_fails_and_loosening_passes() {
    let r = single(
        "id: T-FAIL\nsource: test\nlhs: pow(x, sub(p, 1)); interval(1)\n\
         rhs_closed: div(1.001, p)\nconstraints: none\ndefaults: p=2\n",
    );
    let strict = verify_identity(&r, None, &TolerancePolicy::default()).unwrap();
    assert_eq!(strict.status, Status::Fail);
    assert!((strict.rel_err - 1e-3 / 1.001).abs() < 1e-12);
    let loose = TolerancePolicy {
        rtol: 1e-2,
        ..TolerancePolicy::default()
    };
    assert_eq!(verify_identity(&r, None, &loose).unwrap().status, Status::Pass);
}

#[test]
fn record_tolerance_is_a_floor() {
    let r = record("GR-4.382.5");
    let policy = TolerancePolicy::default();
    assert_eq!(policy.rtol_for(&r), 1e-6);
    let loose = TolerancePolicy { rtol: 1e-3, ..policy };
    assert_eq!(loose.rtol_for(&r), 1e-3);
}

#[test]
fn non_positive_tolerances_are_rejected() {
    let bad = TolerancePolicy {
        atol: 0.0,
        ..TolerancePolicy::default()
    };
    assert!(verify_identity(&record("GR-4.325.1"), None, &bad).is_err());
}

#[test]
fn erratum_claims_hold_at_defaults() {
    for id in ["GR-4.267.30", "GR-4.267.38", "PRUD-2.6.5.2"] {
        let e = check_erratum(&record(id), &TolerancePolicy::default()).unwrap();
        assert!(e.corrected_err < 1e-7, "{e:?}");
        assert!(e.published_err > 1e-4, "{e:?}");
        assert!(e.claim_confirmed(), "{e:?}");
    }
}

#[test]
fn log_beta_erratum_discrepancy_is_log_1_875() {
    let r = record("GR-4.267.38");
    let e = check_erratum(&r, &TolerancePolicy::default()).unwrap();
    let lhs = verify_identity(&r, None, &TolerancePolicy::default()).unwrap().lhs_value.re;
    let published = lhs - 1.875f64.ln();
    assert!((e.published_err - 1.875f64.ln() / published.abs()).abs() < 1e-10);
}

#[test]
fn erratum_check_needs_an_erratum() {
    assert!(matches!(
        check_erratum(&record("PAPER-BETA"), &TolerancePolicy::default()),
        Err(Error::ValidationError { .. })
    ));
}

#[test]
fn suite_filters_and_determinism() {
    let catalog = builtin_catalog();
    let policy = TolerancePolicy::default();
    let none = run_suite(&catalog, &RecordFilter::Id("NO-SUCH".into()), 2, &policy).unwrap();
    assert_eq!(none.summary, SuiteSummary::default());
    assert!(none.succeeded());

    let gr = run_suite(&catalog, &RecordFilter::Source("GR".into()), 4, &policy).unwrap();
    assert!(gr.summary.total > 20);
    assert!(gr.reports.iter().all(|r| r.id.starts_with("GR-")));
    assert!(gr.reports.windows(2).all(|w| w[0].id < w[1].id));

    let errata = RecordFilter::parse("erratum=true").unwrap();
    let e = run_suite(&catalog, &errata, 1, &policy).unwrap();
    assert_eq!(e.summary.total, 3);

    let one = run_suite(&catalog, &RecordFilter::Source("NAHIN".into()), 1, &policy).unwrap();
    let many = run_suite(&catalog, &RecordFilter::Source("NAHIN".into()), 8, &policy).unwrap();
    assert_eq!(one.to_json(), many.to_json());
    assert_eq!(one.to_csv(), many.to_csv());
}

#[test]
fn filter_parsing() {
    assert_eq!(RecordFilter::parse("source=BDH").unwrap(), RecordFilter::Source("BDH".into()));
    assert_eq!(RecordFilter::parse("id=GR-3.237").unwrap(), RecordFilter::Id("GR-3.237".into()));
    assert!(RecordFilter::parse("colour=red").is_err());
    assert!(RecordFilter::parse("erratum=maybe").is_err());
    assert!(RecordFilter::parse("source").is_err());
}

#[test]
fn serializations_carry_the_report_fields() {
    let catalog = builtin_catalog();
    let suite = run_suite(&catalog, &RecordFilter::Source("BRY".into()), 1, &TolerancePolicy::default()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&suite.to_json()).unwrap();
    assert_eq!(doc["summary"]["total"], 3);
    assert_eq!(doc["summary"]["pass"], 3);
    let first = &doc["reports"][0];
    for field in [
        "id",
        "params",
        "lhs_value",
        "rhs_series_value",
        "rhs_closed_value",
        "abs_err",
        "rel_err",
        "terms_used",
        "quad_evals",
        "status",
    ] {
        assert!(first.get(field).is_some(), "missing {field}");
    }
    assert_eq!(first["status"], "pass");
    let csv = suite.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,status,abs_err,rel_err,terms_used,quad_evals");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("BRY-4.1.5.126,pass,"));
}

#[test]
fn unconverged_quadrature_is_skipped() {
    // sin(1/x) oscillates without bound at the origin
    let r = single(
        "id: T-SKIP\nsource: test\nlhs: fx(sin(div(1, x))); interval(1)\n\
         rhs_closed: 0\nconstraints: none\ndefaults: none\n",
    );
    let report = verify_identity(&r, None, &TolerancePolicy::default()).unwrap();
    assert_eq!(report.status, Status::Skipped("quadrature precision insufficient".into()));
    assert_eq!(report.status.to_string(), "skipped(quadrature precision insufficient)");
}
