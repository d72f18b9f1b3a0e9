//! `integra`: list, verify and tabulate the catalogued integral identities.
//!
//! Exit codes: `verify` returns 0 on pass, 1 on fail and 2 on error, skip
//! or bad input; `suite` returns 0 iff no record failed or errored.

mod args;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use num_complex::Complex64 as C64;
use serde_json::json;

use args::{parse_params, parse_range, Cli, Command, Format, ListArgs, Output, PlotArgs, SuiteArgs, Tolerances, VerifyArgs};
use integra::identity_catalog::{builtin_catalog, limits, load_catalog, lookup, realize_integrand, IdentityRecord};
use integra::quadrature::Node;
use integra::verifier::{
    check_erratum, run_suite, verify_identity, verify_identity_sampled, RecordFilter, Status, SuiteReport,
    TolerancePolicy, VerificationReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List(a) => cmd_list(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Suite(a) => cmd_suite(&a),
        Command::PlotData(a) => cmd_plot_data(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Built-in records plus those of `--manifest`, sorted by id.
fn catalog(output: &Output) -> Result<Vec<IdentityRecord>> {
    let mut records = builtin_catalog();
    if let Some(path) = &output.manifest {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let extra = load_catalog(&text).with_context(|| format!("in manifest {}", path.display()))?;
        for r in extra {
            if records.iter().any(|b| b.id == r.id) {
                bail!("manifest {} redefines built-in record {}", path.display(), r.id);
            }
            records.push(r);
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.output_path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn tolerance_policy(t: &Tolerances) -> TolerancePolicy {
    let mut policy = TolerancePolicy::default();
    if let Some(atol) = t.atol {
        policy.atol = atol;
    }
    if let Some(rtol) = t.rtol {
        policy.rtol = rtol;
    }
    policy
}

fn filter(text: Option<&str>) -> Result<RecordFilter> {
    Ok(match text {
        Some(t) => RecordFilter::parse(t)?,
        None => RecordFilter::All,
    })
}

fn cmd_list(a: &ListArgs) -> Result<u8> {
    let f = filter(a.filter.as_deref())?;
    let records: Vec<IdentityRecord> = catalog(&a.output)?
        .into_iter()
        .filter(|r| f.matches(r) && (!a.errata || r.erratum.is_some()))
        .collect();
    let constraints = |r: &IdentityRecord| {
        if r.constraints.is_empty() {
            "none".to_string()
        } else {
            r.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
        }
    };
    let text = match a.output.format {
        Format::Table => {
            let width = records.iter().map(|r| r.id.len()).max().unwrap_or(2);
            let mut s = String::new();
            for r in &records {
                let flag = if r.erratum.is_some() { "erratum" } else { "-" };
                let _ = writeln!(s, "{:width$}  {:7}  {}  [{}]", r.id, flag, r.provenance, constraints(r));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "source": r.provenance,
                        "erratum": r.erratum.is_some(),
                        "constraints": constraints(r),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows)? + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "source", "erratum", "constraints"])?;
            for r in &records {
                w.write_record([&r.id, &r.provenance, &r.erratum.is_some().to_string(), &constraints(r)])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(&a.output, &text)?;
    Ok(0)
}

fn format_complex(z: C64) -> String {
    if z.re.is_nan() {
        "-".into()
    } else {
        format!("{:.15e} {:+.15e}i", z.re, z.im)
    }
}

fn report_table(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", format_complex(*v))).collect();
        let _ = writeln!(s, "id          {}", r.id);
        let _ = writeln!(s, "params      {}", if params.is_empty() { "none".into() } else { params.join(", ") });
        let _ = writeln!(s, "lhs         {}", format_complex(r.lhs_value));
        if let Some(v) = r.rhs_series_value {
            let _ = writeln!(s, "rhs_series  {}", format_complex(v));
        }
        if let Some(v) = r.rhs_closed_value {
            let _ = writeln!(s, "rhs_closed  {}", format_complex(v));
        }
        let _ = writeln!(s, "abs_err     {:e}", r.abs_err);
        let _ = writeln!(s, "rel_err     {:e}", r.rel_err);
        let _ = writeln!(s, "terms_used  {}", r.terms_used);
        let _ = writeln!(s, "quad_evals  {}", r.quad_evals);
        let _ = writeln!(s, "status      {}", r.status);
        s.push('\n');
    }
    s
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let records = catalog(&a.output)?;
    let record = lookup(&records, &a.id)?;
    let policy = tolerance_policy(&a.tolerances);
    let overrides = a.param_overrides.as_deref().map(parse_params).transpose()?;
    let reports = if a.samples > 0 {
        if overrides.is_some() {
            bail!("--params and --samples cannot be combined");
        }
        verify_identity_sampled(record, a.samples, a.seed, &policy)?
    } else {
        vec![verify_identity(record, overrides.as_ref(), &policy)?]
    };

    let text = match a.output.format {
        Format::Table => {
            let mut s = report_table(&reports);
            if record.erratum.is_some() && overrides.is_none() && a.samples == 0 {
                let e = check_erratum(record, &policy)?;
                let _ = writeln!(
                    s,
                    "erratum     corrected_err {:e}, published_err {:e}, claim {}",
                    e.corrected_err,
                    e.published_err,
                    if e.claim_confirmed() { "confirmed" } else { "not confirmed" }
                );
            }
            s
        }
        Format::Json if reports.len() == 1 => serde_json::to_string_pretty(&reports[0].to_json_value())? + "\n",
        Format::Json => SuiteReport::from_reports(reports.clone()).to_json(),
        Format::Csv => SuiteReport::from_reports(reports.clone()).to_csv(),
    };
    emit(&a.output, &text)?;

    let code = if reports.iter().any(|r| matches!(r.status, Status::Error(_) | Status::Skipped(_))) {
        EXIT_ERROR
    } else if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAIL
    } else {
        0
    };
    Ok(code)
}

fn suite_table(suite: &SuiteReport) -> String {
    let width = suite.reports.iter().map(|r| r.id.len()).max().unwrap_or(2);
    let mut s = String::new();
    for r in &suite.reports {
        let _ = writeln!(
            s,
            "{:width$}  {:<10}  rel_err {:9.2e}  terms {:6}  evals {:6}",
            r.id,
            match &r.status {
                Status::Skipped(_) => "skipped".to_string(),
                Status::Error(_) => "error".to_string(),
                other => other.to_string(),
            },
            r.rel_err,
            r.terms_used,
            r.quad_evals
        );
    }
    let m = &suite.summary;
    let _ = writeln!(
        s,
        "\ntotal {}, pass {}, fail {}, skipped {}, error {}",
        m.total, m.pass, m.fail, m.skipped, m.error
    );
    for r in suite.reports.iter().filter(|r| r.status != Status::Pass) {
        let _ = writeln!(s, "{}: {}", r.id, r.status);
    }
    s
}

fn cmd_suite(a: &SuiteArgs) -> Result<u8> {
    let records = catalog(&a.output)?;
    let f = filter(a.filter.as_deref())?;
    let jobs = usize::try_from(a.jobs)?;
    let suite = run_suite(&records, &f, jobs, &tolerance_policy(&a.tolerances))?;
    let text = match a.output.format {
        Format::Table => suite_table(&suite),
        Format::Json => suite.to_json(),
        Format::Csv => suite.to_csv(),
    };
    emit(&a.output, &text)?;
    Ok(if suite.succeeded() { 0 } else { EXIT_FAIL })
}

fn cmd_plot_data(a: &PlotArgs) -> Result<u8> {
    let records = catalog(&a.output)?;
    let record = lookup(&records, &a.id)?;
    let mut params: BTreeMap<String, C64> = record.default_params.clone();
    if let Some(text) = &a.param_overrides {
        for (name, value) in parse_params(text)? {
            let slot = params
                .get_mut(&name)
                .ok_or_else(|| anyhow!("record {} has no parameter '{name}'", record.id))?;
            *slot = value;
        }
    }
    record.check_constraints(&params)?;

    let lim = limits(&record.lhs, &params)?;
    let (lo, hi) = match (&a.range, lim.upper) {
        (Some(r), upper) => {
            let (lo, hi) = parse_range(r)?;
            let within_upper = upper.map_or(true, |u| hi <= u);
            if lo < lim.lower || !within_upper {
                bail!("range [{lo}, {hi}] leaves the interval of {}", record.id);
            }
            (lo, hi)
        }
        (None, Some(upper)) => {
            let inset = 1e-3 * (upper - lim.lower);
            (lim.lower + inset, upper - inset)
        }
        (None, None) => bail!("{} has an infinite interval; give --range", record.id),
    };
    if a.points == 0 {
        bail!("--points must be at least 1");
    }

    let handle = realize_integrand(&record.lhs, &params)?;
    let step = if a.points > 1 { (hi - lo) / (a.points - 1) as f64 } else { 0.0 };
    let rows: Vec<(f64, C64)> = (0..a.points)
        .map(|i| if i + 1 == a.points && a.points > 1 { hi } else { lo + i as f64 * step })
        .filter(|x| !handle.singular_points.iter().any(|s| (x - s).abs() <= 1e-12 * s.abs().max(1.0)))
        .map(|x| (x, handle.evaluate(&Node::at(x))))
        .collect();

    let text = match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "re", "im"])?;
            for (x, v) in &rows {
                w.write_record([format!("{x:e}"), format!("{:e}", v.re), format!("{:e}", v.im)])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Table => rows
            .iter()
            .map(|(x, v)| format!("{x:.12e} {:.12e} {:.12e}\n", v.re, v.im))
            .collect(),
        Format::Json => {
            let doc: Vec<_> = rows.iter().map(|(x, v)| json!({ "x": x, "re": v.re, "im": v.im })).collect();
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(&a.output, &text)?;
    Ok(0)
}
