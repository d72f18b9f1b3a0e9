//! Identity verification: the left-hand side by quadrature against the
//! series and closed-form right-hand sides, with parameter sampling,
//! erratum discrimination and parallel suite runs.
//!
//! Every available side is computed and compared pairwise. A report passes
//! when the largest discrepancy is within `max(atol, rtol * largest
//! magnitude)`, so no side is privileged as the truth.

mod report;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use report::{SuiteReport, SuiteSummary};

use crate::error::{Error, Result};
use crate::identity_catalog::{evaluate_with_policy, integrate_lhs, IdentityRecord, ParameterConstraint, Part};
use crate::summation::AccuracyPolicy;

/// Quadrature target, fixed so that a report never depends on the
/// comparison tolerance except through the final verdict.
const QUADRATURE_REL_TOL: f64 = 1e-12;
const QUADRATURE_ABS_TOL: f64 = 1e-15;

/// Attempts at drawing a sample that satisfies every constraint.
const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub atol: f64,
    pub rtol: f64,
    /// Relative tolerance for records evaluated through finite differences.
    pub derivative_rtol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-8,
            derivative_rtol: 1e-6,
        }
    }
}

impl TolerancePolicy {
    /// Relative tolerance that applies to `record`: never tighter than the
    /// record's own floor.
    pub fn rtol_for(&self, record: &IdentityRecord) -> f64 {
        let mut rtol = self.rtol;
        if record.uses_numerical_derivative() {
            rtol = rtol.max(self.derivative_rtol);
        }
        if let Some(t) = record.tolerance {
            rtol = rtol.max(t);
        }
        rtol
    }

    fn validate(&self) -> Result<()> {
        if self.atol > 0.0 && self.rtol > 0.0 && self.derivative_rtol > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("tolerances must be positive"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
    Error(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("pass"),
            Status::Fail => f.write_str("fail"),
            Status::Skipped(reason) => write!(f, "skipped({reason})"),
            Status::Error(message) => write!(f, "error({message})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub id: String,
    pub params: BTreeMap<String, C64>,
    /// NaN when the quadrature did not produce a value.
    pub lhs_value: C64,
    pub rhs_series_value: Option<C64>,
    pub rhs_closed_value: Option<C64>,
    /// Largest pairwise discrepancy among the available sides.
    pub abs_err: f64,
    /// `abs_err` over the largest magnitude among the sides.
    pub rel_err: f64,
    pub terms_used: usize,
    pub quad_evals: usize,
    pub status: Status,
}

impl VerificationReport {
    fn new(id: &str, params: &BTreeMap<String, C64>) -> Self {
        Self {
            id: id.to_string(),
            params: params.clone(),
            lhs_value: C64::new(f64::NAN, f64::NAN),
            rhs_series_value: None,
            rhs_closed_value: None,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            terms_used: 0,
            quad_evals: 0,
            status: Status::Error("not evaluated".into()),
        }
    }

    fn errored(mut self, side: &str, e: &Error) -> Self {
        self.status = Status::Error(format!("{}: {side}: {e}", self.id));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErratumReport {
    pub id: String,
    pub corrected_matches: bool,
    pub published_matches: bool,
    /// Largest relative discrepancy of the corrected form against the
    /// quadrature and series values.
    pub corrected_err: f64,
    /// Relative discrepancy of the published form against the quadrature.
    pub published_err: f64,
}

impl ErratumReport {
    /// The published form is wrong and the corrected one is right.
    pub fn claim_confirmed(&self) -> bool {
        self.corrected_matches && !self.published_matches
    }
}

/// Which records a suite or listing covers, from `key=value` text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordFilter {
    All,
    /// Id prefix before the first '-', e.g. `GR` or `PRUD`.
    Source(String),
    Id(String),
    Erratum(bool),
}

impl RecordFilter {
    pub fn parse(text: &str) -> Result<Self> {
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("filter '{text}' is not key=value")))?;
        match key.trim() {
            "source" => Ok(RecordFilter::Source(value.trim().to_string())),
            "id" => Ok(RecordFilter::Id(value.trim().to_string())),
            "erratum" => value
                .trim()
                .parse()
                .map(RecordFilter::Erratum)
                .map_err(|_| Error::domain(format!("erratum filter needs true or false, got '{value}'"))),
            other => Err(Error::domain(format!(
                "unknown filter key '{other}' (expected source, id or erratum)"
            ))),
        }
    }

    pub fn matches(&self, record: &IdentityRecord) -> bool {
        match self {
            RecordFilter::All => true,
            RecordFilter::Source(prefix) => record.source_prefix() == prefix,
            RecordFilter::Id(id) => &record.id == id,
            RecordFilter::Erratum(flag) => record.erratum.is_some() == *flag,
        }
    }
}

/// Defaults with `overrides` applied; every override must name a parameter
/// the record declares.
fn merged_params(record: &IdentityRecord, overrides: Option<&BTreeMap<String, C64>>) -> Result<BTreeMap<String, C64>> {
    let mut params = record.default_params.clone();
    for (name, value) in overrides.into_iter().flatten() {
        match params.get_mut(name) {
            Some(slot) => *slot = *value,
            None => {
                return Err(Error::ConstraintViolation(format!(
                    "{}: record has no parameter '{name}'",
                    record.id
                )))
            }
        }
    }
    Ok(params)
}

/// Largest pairwise |difference| and the largest magnitude.
fn discrepancy(values: &[C64]) -> (f64, f64) {
    let mut abs_err: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            abs_err = abs_err.max((a - b).norm());
        }
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (abs_err, scale)
}

fn relative(abs_err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs_err / scale
    } else {
        abs_err
    }
}

fn quadrature_policy(base: &AccuracyPolicy) -> AccuracyPolicy {
    AccuracyPolicy {
        rel_tol: QUADRATURE_REL_TOL,
        abs_tol: QUADRATURE_ABS_TOL,
        ..*base
    }
}

/// Verify `record` at its defaults, with `params` overriding some of them.
pub fn verify_identity(
    record: &IdentityRecord,
    params: Option<&BTreeMap<String, C64>>,
    policy: &TolerancePolicy,
) -> Result<VerificationReport> {
    policy.validate()?;
    let params = merged_params(record, params)?;
    record.check_constraints(&params)?;
    Ok(verify_at(record, &params, policy))
}

fn verify_at(record: &IdentityRecord, params: &BTreeMap<String, C64>, policy: &TolerancePolicy) -> VerificationReport {
    let base = AccuracyPolicy::from_env();
    let mut report = VerificationReport::new(&record.id, params);
    let rtol = policy.rtol_for(record);

    let quad = match integrate_lhs(&record.lhs, params, &quadrature_policy(&base)) {
        Ok(q) => q,
        Err(Error::NonConvergence { .. }) => {
            report.status = Status::Skipped("quadrature precision insufficient".into());
            return report;
        }
        Err(e) => return report.errored("lhs", &e),
    };
    report.lhs_value = quad.value;
    report.quad_evals = quad.evaluations;
    let mut values = vec![quad.value];

    if let Some(series) = &record.rhs_series {
        match series.evaluate(params, &base) {
            Ok(s) => {
                report.rhs_series_value = Some(s.value);
                report.terms_used = s.terms_used;
                values.push(s.value);
            }
            Err(e) => return report.errored("rhs_series", &e),
        }
    }
    if let Some(closed) = &record.rhs_closed {
        match evaluate_with_policy(closed, params, &base) {
            Ok(v) => {
                report.rhs_closed_value = Some(v);
                values.push(v);
            }
            Err(e) => return report.errored("rhs_closed", &e),
        }
    }
    if let Some(bad) = values.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
        let e = Error::EvaluationError {
            path: "comparison".into(),
            message: format!("non-finite value {bad}"),
        };
        return report.errored("sides", &e);
    }

    let (abs_err, scale) = discrepancy(&values);
    report.abs_err = abs_err;
    report.rel_err = relative(abs_err, scale);
    let allowed = policy.atol.max(rtol * scale);
    report.status = if quad.error_estimate > allowed {
        Status::Skipped("quadrature precision insufficient".into())
    } else if abs_err <= allowed {
        Status::Pass
    } else {
        Status::Fail
    };
    report
}

/// A sampling box: the real or imaginary part of one parameter.
struct Draw {
    param: String,
    part: Part,
    lower: f64,
    upper: f64,
    integer: bool,
}

fn sampling_boxes(record: &IdentityRecord) -> Vec<Draw> {
    let integers: Vec<&str> = record
        .constraints
        .iter()
        .filter_map(|c| match c {
            ParameterConstraint::Integer { param } => Some(param.as_str()),
            _ => None,
        })
        .collect();
    record
        .constraints
        .iter()
        .filter_map(|c| match c {
            ParameterConstraint::Range {
                param,
                part: part @ (Part::Re | Part::Im),
                lower,
                upper,
                ..
            } => Some(Draw {
                param: param.clone(),
                part: *part,
                lower: *lower,
                upper: *upper,
                integer: *part == Part::Re && integers.contains(&param.as_str()),
            }),
            _ => None,
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, boxes: &[Draw], defaults: &BTreeMap<String, C64>) -> BTreeMap<String, C64> {
    let mut params = defaults.clone();
    for b in boxes {
        let value = if b.integer {
            let lo = b.lower.ceil() as i64;
            let hi = b.upper.floor() as i64;
            if lo > hi {
                continue;
            }
            rng.gen_range(lo..=hi) as f64
        } else {
            rng.gen_range(b.lower..=b.upper)
        };
        let slot = params.get_mut(&b.param).expect("constraint names a declared parameter");
        match b.part {
            Part::Re => slot.re = value,
            _ => slot.im = value,
        }
    }
    params
}

/// Verify at `n_samples` points drawn uniformly from the record's sampling
/// boxes, deterministically from `seed`. Records without boxes are checked
/// once at their defaults.
pub fn verify_identity_sampled(
    record: &IdentityRecord,
    n_samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
) -> Result<Vec<VerificationReport>> {
    policy.validate()?;
    if n_samples == 0 {
        return Ok(Vec::new());
    }
    let boxes = sampling_boxes(record);
    if boxes.is_empty() {
        return Ok(vec![verify_identity(record, None, policy)?]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let params = (0..MAX_RESAMPLES)
            .map(|_| draw(&mut rng, &boxes, &record.default_params))
            .find(|p| record.check_constraints(p).is_ok())
            .ok_or_else(|| {
                Error::ConstraintViolation(format!(
                    "{}: no sample satisfied the constraints in {MAX_RESAMPLES} draws",
                    record.id
                ))
            })?;
        reports.push(verify_at(record, &params, policy));
    }
    Ok(reports)
}

/// Check an erratum record at its defaults: the corrected form must agree
/// with the integral and the published form must miss it by more than ten
/// times the tolerance.
pub fn check_erratum(record: &IdentityRecord, policy: &TolerancePolicy) -> Result<ErratumReport> {
    policy.validate()?;
    let erratum = record.erratum.as_ref().ok_or_else(|| Error::ValidationError {
        id: record.id.clone(),
        field: "erratum_published".into(),
        message: "record carries no erratum".into(),
    })?;
    let params = &record.default_params;
    let base = AccuracyPolicy::from_env();
    let rtol = policy.rtol_for(record);

    let lhs = integrate_lhs(&record.lhs, params, &quadrature_policy(&base))?.value;
    let mut references = vec![lhs];
    if let Some(series) = &record.rhs_series {
        references.push(series.evaluate(params, &base)?.value);
    }
    let corrected = evaluate_with_policy(&erratum.corrected_form, params, &base)?;
    let published = evaluate_with_policy(&erratum.published_form, params, &base)?;

    let mut corrected_err: f64 = 0.0;
    let mut corrected_matches = true;
    for r in &references {
        let (abs_err, scale) = discrepancy(&[corrected, *r]);
        corrected_err = corrected_err.max(relative(abs_err, scale));
        corrected_matches &= abs_err <= policy.atol.max(rtol * scale);
    }
    let (abs_err, scale) = discrepancy(&[published, lhs]);
    let published_err = relative(abs_err, scale);
    let published_matches = abs_err <= 10.0 * policy.atol.max(rtol * scale);

    Ok(ErratumReport {
        id: record.id.clone(),
        corrected_matches,
        published_matches,
        corrected_err,
        published_err,
    })
}

/// Verify every record that passes `filter` at its defaults on `jobs`
/// worker threads. Reports come back sorted by id whatever the thread count.
pub fn run_suite(
    records: &[IdentityRecord],
    filter: &RecordFilter,
    jobs: usize,
    policy: &TolerancePolicy,
) -> Result<SuiteReport> {
    policy.validate()?;
    let selected: Vec<&IdentityRecord> = records.iter().filter(|r| filter.matches(r)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    let mut reports: Vec<VerificationReport> = pool.install(|| {
        selected
            .par_iter()
            .map(|r| {
                verify_identity(r, None, policy).unwrap_or_else(|e| {
                    let report = VerificationReport::new(&r.id, &r.default_params);
                    report.errored("parameters", &e)
                })
            })
            .collect()
    });
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SuiteReport::from_reports(reports))
}

#[cfg(test)]
mod tests;
