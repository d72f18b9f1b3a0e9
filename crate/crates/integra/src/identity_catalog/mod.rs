//! Machine-readable identity records and the line-oriented manifest format.
//!
//! A record is a block of `key: value` lines in this order, ended by a blank
//! line:
//!
//! ```text
//! id: GR-4.325.1
//! source: Gradshteyn-Ryzhik 4.325.1
//! lhs: loglogrecip(1) * binom(1, 1, -1); interval(1)
//! rhs_series: main(m=1, k=0, b=1, c=1, weight=loglog)
//! rhs_closed: neg(div(pow(log(2), 2), 2))
//! constraints: none
//! defaults: none
//! ```
//!
//! `rhs_series`, `rhs_closed`, `erratum_published` and `tolerance` are
//! optional; at least one right-hand side is required. Lines starting with
//! `#` are comments.

mod constraints;
mod expr;
mod integrand;
mod lexer;
mod series;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

pub use constraints::{Comparison, ParameterConstraint, Part};
pub use expr::{evaluate_closed_form, evaluate_with_policy, ClosedFormExpr, Constant, Expr, Func, INTEGRATION_VARIABLE};
pub use integrand::{integrate_lhs, limits, realize_integrand, realize_with_policy, Factor, IntegrandSpec, Limits};
pub use series::{SeriesSpec, Theorem};

use crate::error::{Error, Result};
use crate::summation::AccuracyPolicy;
use lexer::{parse_error, Cursor, Tok};

/// What an erratum record asserts: the corrected form agrees with the
/// integral and the published form does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErratumClaim {
    PublishedFormDiffers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErratumInfo {
    pub published_form: ClosedFormExpr,
    pub corrected_form: ClosedFormExpr,
    pub claim: ErratumClaim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRecord {
    pub id: String,
    pub lhs: IntegrandSpec,
    pub rhs_series: Option<SeriesSpec>,
    pub rhs_closed: Option<ClosedFormExpr>,
    pub constraints: Vec<ParameterConstraint>,
    pub default_params: BTreeMap<String, C64>,
    pub erratum: Option<ErratumInfo>,
    /// Relative tolerance overriding the verifier default.
    pub tolerance: Option<f64>,
    pub provenance: String,
}

impl IdentityRecord {
    /// Leading part of the id up to the first '-', e.g. `GR` or `PRUD`.
    pub fn source_prefix(&self) -> &str {
        self.id.split('-').next().unwrap_or(&self.id)
    }

    /// Whether any side is evaluated through numerical differentiation.
    pub fn uses_numerical_derivative(&self) -> bool {
        self.lhs.uses_numerical_derivative()
            || self.rhs_closed.as_ref().is_some_and(Expr::uses_numerical_derivative)
            || self
                .rhs_series
                .as_ref()
                .is_some_and(|s| s.bindings.iter().any(|(_, e)| e.uses_numerical_derivative()))
    }

    /// Check every constraint at `params`.
    pub fn check_constraints(&self, params: &BTreeMap<String, C64>) -> Result<()> {
        for c in &self.constraints {
            c.check(params)
                .map_err(|m| Error::ConstraintViolation(format!("{}: {m}", self.id)))?;
        }
        Ok(())
    }
}

const FIELDS: &[&str] = &[
    "id",
    "source",
    "lhs",
    "rhs_series",
    "rhs_closed",
    "constraints",
    "defaults",
    "erratum_published",
    "tolerance",
];
const OPTIONAL: &[&str] = &["rhs_series", "rhs_closed", "erratum_published", "tolerance"];

/// Names that cannot be parameters.
fn reserved(name: &str) -> bool {
    name == INTEGRATION_VARIABLE
        || name == "inf"
        || name == "none"
        || Constant::from_name(name).is_some()
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    value: &'a str,
    /// 1-based column where `value` starts.
    column: usize,
}

/// Parse and validate a manifest.
pub fn load_catalog(text: &str) -> Result<Vec<IdentityRecord>> {
    let mut blocks: Vec<Vec<Line>> = vec![Vec::new()];
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let trimmed = raw.trim_end();
        if trimmed.trim_start().starts_with('#') {
            continue;
        }
        if trimmed.trim().is_empty() {
            if !blocks.last().expect("non-empty").is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        let colon = trimmed
            .find(':')
            .ok_or_else(|| parse_error(number, 1, "expected 'key: value'"))?;
        let key = trimmed[..colon].trim();
        let rest = &trimmed[colon + 1..];
        let value = rest.trim_start();
        let column = trimmed[..colon + 1].chars().count() + (rest.chars().count() - value.chars().count()) + 1;
        blocks.last_mut().expect("non-empty").push(Line { number, key, value, column });
    }
    let mut records: Vec<IdentityRecord> = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let record = parse_record(&block)?;
        if records.iter().any(|r| r.id == record.id) {
            return Err(Error::ValidationError {
                id: record.id,
                field: "id".into(),
                message: "duplicate id".into(),
            });
        }
        validate(&record)?;
        records.push(record);
    }
    Ok(records)
}

fn parse_record(block: &[Line]) -> Result<IdentityRecord> {
    let mut next_field = 0;
    let mut values: BTreeMap<&str, &Line> = BTreeMap::new();
    for line in block {
        let position = FIELDS
            .iter()
            .position(|f| *f == line.key)
            .ok_or_else(|| parse_error(line.number, 1, format!("unknown field '{}'", line.key)))?;
        if position < next_field {
            return Err(parse_error(line.number, 1, format!("field '{}' out of order or repeated", line.key)));
        }
        for skipped in &FIELDS[next_field..position] {
            if !OPTIONAL.contains(skipped) {
                return Err(parse_error(line.number, 1, format!("missing field '{skipped}' before '{}'", line.key)));
            }
        }
        values.insert(FIELDS[position], line);
        next_field = position + 1;
    }
    let last = block.last().expect("non-empty block");
    for required in FIELDS.iter().filter(|f| !OPTIONAL.contains(f)) {
        if !values.contains_key(required) {
            return Err(parse_error(last.number + 1, 1, format!("record lacks field '{required}'")));
        }
    }
    let cursor = |name: &str| -> Result<Option<Cursor>> {
        values.get(name).map(|l| Cursor::new(l.value, l.number, l.column)).transpose()
    };
    let finish = |cur: Cursor| cur.finish().map(|_| ());

    let id = values["id"].value.to_string();
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(parse_error(values["id"].number, values["id"].column, "id must be a single non-empty word"));
    }
    let provenance = values["source"].value.to_string();

    let mut cur = cursor("lhs")?.expect("required");
    let lhs = integrand::parse_integrand(&mut cur)?;
    finish(cur)?;

    let rhs_series = match cursor("rhs_series")? {
        Some(mut cur) => {
            let s = series::parse_series(&mut cur)?;
            finish(cur)?;
            Some(s)
        }
        None => None,
    };
    let rhs_closed = match cursor("rhs_closed")? {
        Some(mut cur) => {
            let e = expr::parse_expr(&mut cur)?;
            finish(cur)?;
            Some(e)
        }
        None => None,
    };
    let mut cur = cursor("constraints")?.expect("required");
    let constraints = constraints::parse_constraints(&mut cur)?;
    finish(cur)?;

    let mut cur = cursor("defaults")?.expect("required");
    let default_params = parse_defaults(&mut cur)?;
    finish(cur)?;

    let erratum = match cursor("erratum_published")? {
        Some(mut cur) => {
            let published = expr::parse_expr(&mut cur)?;
            finish(cur)?;
            let corrected = rhs_closed.clone().ok_or_else(|| Error::ValidationError {
                id: id.clone(),
                field: "erratum_published".into(),
                message: "an erratum needs the corrected form in rhs_closed".into(),
            })?;
            Some(ErratumInfo {
                published_form: published,
                corrected_form: corrected,
                claim: ErratumClaim::PublishedFormDiffers,
            })
        }
        None => None,
    };
    let tolerance = match cursor("tolerance")? {
        Some(mut cur) => {
            let t = cur.number()?;
            finish(cur)?;
            Some(t)
        }
        None => None,
    };
    Ok(IdentityRecord {
        id,
        lhs,
        rhs_series,
        rhs_closed,
        constraints,
        default_params,
        erratum,
        tolerance,
        provenance,
    })
}

fn parse_defaults(cur: &mut Cursor) -> Result<BTreeMap<String, C64>> {
    let mut out = BTreeMap::new();
    if cur.peek() == Some(&Tok::Ident("none".into())) && cur.peek_at(1).is_none() {
        cur.next();
        return Ok(out);
    }
    let policy = AccuracyPolicy::default();
    let empty = BTreeMap::new();
    loop {
        let column = cur.column();
        let name = cur.ident("a parameter name")?;
        if out.contains_key(&name) {
            return Err(cur.error_at(column, format!("parameter '{name}' given twice")));
        }
        cur.expect(Tok::Eq, "'='")?;
        let value_column = cur.column();
        let e = expr::parse_expr(cur)?;
        let v = evaluate_with_policy(&e, &empty, &policy)
            .map_err(|err| cur.error_at(value_column, format!("default for '{name}' is not a constant: {err}")))?;
        out.insert(name, v);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(out)
}

fn validation(id: &str, field: &str, message: impl Into<String>) -> Error {
    Error::ValidationError {
        id: id.to_string(),
        field: field.to_string(),
        message: message.into(),
    }
}

fn validate(r: &IdentityRecord) -> Result<()> {
    let id = r.id.as_str();
    if r.rhs_series.is_none() && r.rhs_closed.is_none() {
        return Err(validation(id, "rhs_closed", "a record needs rhs_series or rhs_closed"));
    }
    for name in r.default_params.keys() {
        if reserved(name) {
            return Err(validation(id, "defaults", format!("'{name}' is a reserved name")));
        }
    }
    let mut sides: Vec<(&str, Vec<String>)> = vec![("lhs", r.lhs.free_variables())];
    if let Some(s) = &r.rhs_series {
        sides.push(("rhs_series", s.free_variables()));
    }
    if let Some(e) = &r.rhs_closed {
        sides.push(("rhs_closed", e.free_variables()));
    }
    if let Some(e) = &r.erratum {
        sides.push(("erratum_published", e.published_form.free_variables()));
    }
    sides.push(("constraints", r.constraints.iter().map(|c| c.param().to_string()).collect()));
    for (field, vars) in sides {
        if let Some(v) = vars.iter().find(|v| !r.default_params.contains_key(*v)) {
            return Err(validation(id, field, format!("parameter '{v}' has no default")));
        }
    }
    if r.lhs.upper.is_none() && r.lhs.oscillation.is_none() {
        return Err(validation(id, "lhs", "an infinite interval needs oscillatory(frequency)"));
    }
    if let Some(t) = r.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(validation(id, "tolerance", "tolerance must be positive"));
        }
    }
    for c in &r.constraints {
        c.check(&r.default_params)
            .map_err(|m| validation(id, "defaults", format!("defaults violate a constraint: {m}")))?;
    }
    Ok(())
}

fn format_value(v: C64) -> String {
    if v.im == 0.0 {
        expr::format_number(v.re)
    } else {
        format!("complex({}, {})", expr::format_number(v.re), expr::format_number(v.im))
    }
}

/// Serialize records to manifest text; `load_catalog` reads it back to equal
/// records.
pub fn serialize_catalog(records: &[IdentityRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "id: {}", r.id);
        let _ = writeln!(out, "source: {}", r.provenance);
        let _ = writeln!(out, "lhs: {}", r.lhs);
        if let Some(s) = &r.rhs_series {
            let _ = writeln!(out, "rhs_series: {s}");
        }
        if let Some(e) = &r.rhs_closed {
            let _ = writeln!(out, "rhs_closed: {e}");
        }
        let constraints = if r.constraints.is_empty() {
            "none".to_string()
        } else {
            r.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
        };
        let _ = writeln!(out, "constraints: {constraints}");
        let defaults = if r.default_params.is_empty() {
            "none".to_string()
        } else {
            r.default_params
                .iter()
                .map(|(k, v)| format!("{k}={}", format_value(*v)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(out, "defaults: {defaults}");
        if let Some(e) = &r.erratum {
            let _ = writeln!(out, "erratum_published: {}", e.published_form);
        }
        if let Some(t) = r.tolerance {
            let _ = writeln!(out, "tolerance: {}", expr::format_number(t));
        }
        out.push('\n');
    }
    out
}

const BUILTIN_MANIFEST: &str = include_str!("builtin.manifest");

/// The bundled catalog of verified identities.
pub fn builtin_catalog() -> Vec<IdentityRecord> {
    static CATALOG: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    CATALOG
        .get_or_init(|| load_catalog(BUILTIN_MANIFEST).expect("bundled manifest is valid"))
        .clone()
}

/// Find a record by id.
pub fn lookup<'a>(records: &'a [IdentityRecord], id: &str) -> Result<&'a IdentityRecord> {
    records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::UnknownId(id.to_string()))
}
