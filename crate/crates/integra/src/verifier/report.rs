//! Suite aggregation and its JSON and CSV serializations.

use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use super::{Status, VerificationReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteSummary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub summary: SuiteSummary,
    /// Sorted by id.
    pub reports: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn from_reports(reports: Vec<VerificationReport>) -> Self {
        let mut summary = SuiteSummary {
            total: reports.len(),
            ..SuiteSummary::default()
        };
        for r in &reports {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped(_) => summary.skipped += 1,
                Status::Error(_) => summary.error += 1,
            }
        }
        Self { summary, reports }
    }

    /// Exit status of a suite run: no failures and no errors.
    pub fn succeeded(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }

    pub fn to_json(&self) -> String {
        let s = &self.summary;
        let doc = json!({
            "summary": {
                "total": s.total,
                "pass": s.pass,
                "fail": s.fail,
                "skipped": s.skipped,
                "error": s.error,
            },
            "reports": self.reports.iter().map(VerificationReport::to_json_value).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        text.push('\n');
        text
    }

    /// One row per report: id, status, abs_err, rel_err, terms_used, quad_evals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "status", "abs_err", "rel_err", "terms_used", "quad_evals"])
            .expect("writing to memory");
        for r in &self.reports {
            w.write_record([
                r.id.clone(),
                r.status.to_string(),
                format_real(r.abs_err),
                format_real(r.rel_err),
                r.terms_used.to_string(),
                r.quad_evals.to_string(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV of UTF-8 fields")
    }
}

impl VerificationReport {
    pub fn to_json_value(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), complex_json(*v))).collect();
        json!({
            "id": self.id,
            "params": params,
            "lhs_value": complex_json(self.lhs_value),
            "rhs_series_value": self.rhs_series_value.map(complex_json),
            "rhs_closed_value": self.rhs_closed_value.map(complex_json),
            "abs_err": real_json(self.abs_err),
            "rel_err": real_json(self.rel_err),
            "terms_used": self.terms_used,
            "quad_evals": self.quad_evals,
            "status": self.status.to_string(),
        })
    }
}

/// Non-finite numbers become null.
fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn complex_json(z: C64) -> Value {
    json!({ "re": real_json(z.re), "im": real_json(z.im) })
}

fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}
