//! Command-line arguments and the parsers for their value syntaxes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

#[derive(Debug, Parser)]
#[command(
    name = "integra",
    version,
    about = "Verify definite-integral identities by quadrature, series and closed forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog records
    List(ListArgs),
    /// Verify one identity at its defaults, given parameters or sampled points
    Verify(VerifyArgs),
    /// Verify every selected record at its defaults
    Suite(SuiteArgs),
    /// Tabulate the integrand on an evenly spaced grid
    PlotData(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long = "out", value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    /// Extra manifest whose records join the built-in catalog
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Tolerances {
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    /// Only records that carry an erratum
    #[arg(long)]
    pub errata: bool,
    /// key=value with key source, id or erratum
    #[arg(long)]
    pub filter: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub id: String,
    /// Comma-separated name=re[+imj] overrides, e.g. p=3,a=1+0.5j
    #[arg(long = "params", value_name = "LIST")]
    pub param_overrides: Option<String>,
    /// Sample this many points from the record's parameter boxes
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tolerances: Tolerances,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// key=value with key source, id or erratum
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    #[command(flatten)]
    pub tolerances: Tolerances,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// lo,hi inside the record's interval; defaults to the interval inset
    /// by a thousandth of its width
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Comma-separated name=re[+imj] overrides
    #[arg(long = "params", value_name = "LIST")]
    pub param_overrides: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

/// Parse `re`, `re+imj`, `re-imj` or `imj` as decimal doubles.
pub fn parse_complex(text: &str) -> Result<C64> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('j') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).context(format!("bad number '{t}'"));
    };
    // the sign that separates the parts is the last one not opening an exponent
    let split = body
        .char_indices()
        .filter(|&(i, c)| {
            (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
        })
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    let re: f64 = re.parse().context(format!("bad real part in '{t}'"))?;
    let im: f64 = im.trim_start_matches('+').parse().context(format!("bad imaginary part in '{t}'"))?;
    Ok(C64::new(re, im))
}

/// Parse `name=value,name=value`.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, C64>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter '{item}' is not name=value"))?;
        let name = name.trim();
        if name.is_empty() {
            bail!("parameter '{item}' has no name");
        }
        if out.insert(name.to_string(), parse_complex(value)?).is_some() {
            bail!("parameter {name} given twice");
        }
    }
    Ok(out)
}

/// Parse `lo,hi` with lo < hi.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text.split_once(',').ok_or_else(|| anyhow!("range '{text}' is not lo,hi"))?;
    let lo: f64 = lo.trim().parse().context("bad range start")?;
    let hi: f64 = hi.trim().parse().context("bad range end")?;
    if !(lo < hi) {
        bail!("range start {lo} must be below its end {hi}");
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1+0.5j").unwrap(), C64::new(1.0, 0.5));
        assert_eq!(parse_complex("-1-0.5j").unwrap(), C64::new(-1.0, -0.5));
        assert_eq!(parse_complex("2.5j").unwrap(), C64::new(0.0, 2.5));
        assert_eq!(parse_complex("1e-3+2e+1j").unwrap(), C64::new(1e-3, 20.0));
        assert_eq!(parse_complex("1+j").unwrap(), C64::new(1.0, 1.0));
        assert!(parse_complex("one").is_err());
        assert!(parse_complex("1+xj").is_err());
    }

    #[test]
    fn parameter_lists() {
        let p = parse_params("p=3, q=4").unwrap();
        assert_eq!(p["p"], C64::new(3.0, 0.0));
        assert_eq!(p["q"], C64::new(4.0, 0.0));
        assert!(parse_params("p").is_err());
        assert!(parse_params("p=1,p=2").is_err());
        assert!(parse_params("").unwrap().is_empty());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.001,0.999").unwrap(), (0.001, 0.999));
        assert!(parse_range("1,0").is_err());
        assert!(parse_range("1").is_err());
    }
}
