//! Right-hand sides given as a theorem family with bound parameters, e.g.
//! `main(m=1, k=0, a=1, b=2, c=1, weight=loglog, scale=-1)`.
//!
//! Binding values are expressions in the record parameters. `weight` takes
//! `power` or `loglog`, `scale` multiplies the series, and the general
//! binomial family numbers its factors `coeff1, exp1, outer1, coeff2, ...`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use super::expr::{eval, parse_expr, Expr, Scope};
use super::lexer::{Cursor, Tok};
use crate::error::{Error, Result};
use crate::series_engine::*;
use crate::summation::AccuracyPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Main,
    Polynomial,
    GeneralBinomial,
    FiniteInterval,
    LogBinomial,
    Bessel,
    BesselProduct,
    ExpBinomial2F1,
    LerchIntegral,
    HypergeometricIntegral,
    BesselLog,
    BesselPower,
    BesselExp,
}

/// Name, required bindings and optional bindings (with their defaults in the
/// evaluator) of every family.
const THEOREMS: &[(Theorem, &str, &[&str], &[&str])] = &[
    (Theorem::Main, "main", &["m", "b", "c"], &["k", "a"]),
    (Theorem::Polynomial, "polynomial", &["m", "b", "n"], &["k", "a"]),
    (Theorem::GeneralBinomial, "general_binomial", &["m"], &["k", "a", "upper"]),
    (Theorem::FiniteInterval, "finite_interval", &["m", "c", "z", "d"], &["k", "a", "upper"]),
    (Theorem::LogBinomial, "log_binomial", &["m", "b", "c"], &["k", "a"]),
    (Theorem::Bessel, "bessel", &["m", "b", "n", "v", "z"], &["k", "a"]),
    (Theorem::BesselProduct, "bessel_product", &["m", "b", "n", "v", "mu", "z"], &["k", "a"]),
    (
        Theorem::ExpBinomial2F1,
        "exp_binomial_2f1",
        &["m", "b", "n", "s", "alpha", "beta", "gamma", "z"],
        &["k", "a"],
    ),
    (Theorem::LerchIntegral, "lerch_integral", &["m", "s", "v"], &["k", "a", "upper"]),
    (
        Theorem::HypergeometricIntegral,
        "hypergeometric_integral",
        &["m", "alpha", "beta", "gamma"],
        &["k", "a", "upper"],
    ),
    (Theorem::BesselLog, "bessel_log", &["m", "v"], &["k", "a", "upper"]),
    (Theorem::BesselPower, "bessel_power", &["m", "v", "alpha"], &["k", "a", "upper"]),
    (
        Theorem::BesselExp,
        "bessel_exp",
        &["m", "v", "alpha", "f", "g", "c", "p", "d"],
        &["k", "a", "upper"],
    ),
];

impl Theorem {
    pub fn name(self) -> &'static str {
        THEOREMS.iter().find(|t| t.0 == self).map(|t| t.1).unwrap_or("?")
    }

    pub fn from_name(name: &str) -> Option<Self> {
        THEOREMS.iter().find(|t| t.1 == name).map(|t| t.0)
    }

    fn required(self) -> &'static [&'static str] {
        THEOREMS.iter().find(|t| t.0 == self).map(|t| t.2).unwrap_or(&[])
    }

    fn optional(self) -> &'static [&'static str] {
        THEOREMS.iter().find(|t| t.0 == self).map(|t| t.3).unwrap_or(&[])
    }

    /// Whether `name` may be bound for this family.
    pub fn accepts(self, name: &str) -> bool {
        if self.required().contains(&name) || self.optional().contains(&name) || name == "weight" || name == "scale" {
            return true;
        }
        self == Theorem::GeneralBinomial && factor_slot(name).is_some()
    }
}

/// `coeff3` → (field, 3)
fn factor_slot(name: &str) -> Option<(&str, usize)> {
    for field in ["coeff", "exp", "outer"] {
        if let Some(index) = name.strip_prefix(field) {
            if let Ok(i) = index.parse::<usize>() {
                if i >= 1 {
                    return Some((field, i));
                }
            }
        }
    }
    None
}

/// A theorem family applied to bound parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub theorem: Theorem,
    pub bindings: Vec<(String, Expr)>,
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.theorem.name())?;
        for (i, (name, value)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn parse_series(cur: &mut Cursor) -> Result<SeriesSpec> {
    let column = cur.column();
    let name = cur.ident("a theorem name")?;
    let theorem =
        Theorem::from_name(&name).ok_or_else(|| cur.error_at(column, format!("unknown theorem '{name}'")))?;
    cur.expect(Tok::LParen, "'('")?;
    let mut bindings: Vec<(String, Expr)> = Vec::new();
    if !cur.eat(&Tok::RParen) {
        loop {
            let column = cur.column();
            let key = cur.ident("a binding name")?;
            if !theorem.accepts(&key) {
                return Err(cur.error_at(column, format!("{name} has no parameter '{key}'")));
            }
            if bindings.iter().any(|(k, _)| *k == key) {
                return Err(cur.error_at(column, format!("'{key}' bound twice")));
            }
            cur.expect(Tok::Eq, "'='")?;
            let value = parse_expr(cur)?;
            if key == "weight" && !matches!(&value, Expr::Var(w) if w == "power" || w == "loglog") {
                return Err(cur.error_at(column, "weight must be power or loglog"));
            }
            bindings.push((key, value));
            if cur.eat(&Tok::RParen) {
                break;
            }
            cur.expect(Tok::Comma, "',' or ')'")?;
        }
    }
    for required in theorem.required() {
        if !bindings.iter().any(|(k, _)| k == required) {
            return Err(cur.error_at(column, format!("{name} needs a binding for '{required}'")));
        }
    }
    if theorem == Theorem::GeneralBinomial {
        let count = general_binomial_factor_count(&bindings);
        for i in 1..=count {
            for field in ["coeff", "exp", "outer"] {
                if !bindings.iter().any(|(k, _)| *k == format!("{field}{i}")) {
                    return Err(cur.error_at(column, format!("general_binomial factor {i} lacks '{field}{i}'")));
                }
            }
        }
    }
    Ok(SeriesSpec { theorem, bindings })
}

fn general_binomial_factor_count(bindings: &[(String, Expr)]) -> usize {
    bindings
        .iter()
        .filter_map(|(k, _)| factor_slot(k).map(|(_, i)| i))
        .max()
        .unwrap_or(0)
}

impl SeriesSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text, 1, 1)?;
        let spec = parse_series(&mut cur)?;
        cur.finish()?;
        Ok(spec)
    }

    pub fn free_variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (key, value) in &self.bindings {
            if key == "weight" {
                continue;
            }
            for v in value.free_variables() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    fn weight(&self) -> LogWeight {
        match self.bindings.iter().find(|(k, _)| k == "weight") {
            Some((_, Expr::Var(w))) if w == "loglog" => LogWeight::LogLog,
            _ => LogWeight::Power,
        }
    }

    /// Evaluate the series at the given parameters.
    pub fn evaluate(&self, params: &BTreeMap<String, C64>, policy: &AccuracyPolicy) -> Result<SeriesResult> {
        let mut scope = Scope::new(params, policy);
        let mut values: BTreeMap<&str, C64> = BTreeMap::new();
        for (key, value) in &self.bindings {
            if key != "weight" {
                let v = eval(value, &mut scope).map_err(|e| match e {
                    Error::EvaluationError { path, message } => Error::EvaluationError {
                        path: format!("rhs_series/{key}/{path}"),
                        message,
                    },
                    other => other,
                })?;
                values.insert(key.as_str(), v);
            }
        }
        let get = |name: &str, default: f64| values.get(name).copied().unwrap_or(C64::new(default, 0.0));
        let count = |name: &str| -> Result<u32> {
            let v = get(name, 0.0);
            if v.im == 0.0 && v.re >= 0.0 && v.re.fract() == 0.0 && v.re <= u32::MAX as f64 {
                Ok(v.re as u32)
            } else {
                Err(Error::EvaluationError {
                    path: format!("rhs_series/{name}"),
                    message: format!("expected a non-negative integer, got {v}"),
                })
            }
        };
        let weight = self.weight();
        let (m, k, a, upper) = (get("m", 0.0), get("k", 0.0), get("a", 1.0), get("upper", 1.0));
        let sum = match self.theorem {
            Theorem::Main => eval_theorem_main(
                &MainParams { m, k, a, b: get("b", 0.0), c: get("c", 0.0), weight },
                policy,
            )?,
            Theorem::Polynomial => eval_polynomial_theorem(
                &PolynomialParams { m, b: get("b", 0.0), n: count("n")?, k, a, weight },
                policy,
            )?,
            Theorem::GeneralBinomial => {
                let factors = (1..=general_binomial_factor_count(&self.bindings))
                    .map(|i| BinomialFactor {
                        coeff: get(&format!("coeff{i}"), 0.0),
                        exponent: get(&format!("exp{i}"), 0.0),
                        outer: get(&format!("outer{i}"), 0.0),
                    })
                    .collect();
                eval_general_binomial(&GeneralBinomialParams { m, k, a, upper, factors, weight }, policy)?
            }
            Theorem::FiniteInterval => eval_finite_interval(
                &FiniteIntervalParams { m, k, a, upper, c: get("c", 0.0), z: get("z", 0.0), d: get("d", 0.0), weight },
                policy,
            )?,
            Theorem::LogBinomial => eval_log_binomial_family(
                &LogBinomialParams { m, k, a, b: get("b", 0.0), c: get("c", 0.0), weight },
                policy,
            )?,
            Theorem::Bessel => eval_bessel_theorem(
                &BesselParams { m, b: get("b", 0.0), n: count("n")?, v: get("v", 0.0), z: get("z", 0.0), k, a, weight },
                policy,
            )?,
            Theorem::BesselProduct => eval_bessel_product_theorem(
                &BesselProductParams {
                    m,
                    b: get("b", 0.0),
                    n: count("n")?,
                    v: get("v", 0.0),
                    mu: get("mu", 0.0),
                    z: get("z", 0.0),
                    k,
                    a,
                    weight,
                },
                policy,
            )?,
            Theorem::ExpBinomial2F1 => eval_exp_binomial_2f1_theorem(
                &ExpBinomial2F1Params {
                    m,
                    b: get("b", 0.0),
                    n: count("n")?,
                    s: get("s", 0.0),
                    alpha: get("alpha", 0.0),
                    beta: get("beta", 0.0),
                    gamma: get("gamma", 0.0),
                    z: get("z", 0.0),
                    k,
                    a,
                    weight,
                },
                policy,
            )?,
            Theorem::LerchIntegral => eval_lerch_integral_theorem(
                &LerchIntegralParams { m, s: get("s", 0.0), v: get("v", 0.0), k, a, upper, weight },
                policy,
            )?,
            Theorem::HypergeometricIntegral => eval_hypergeometric_integral_theorem(
                &HypergeometricIntegralParams {
                    m,
                    alpha: get("alpha", 0.0),
                    beta: get("beta", 0.0),
                    gamma: get("gamma", 0.0),
                    k,
                    a,
                    upper,
                    weight,
                },
                policy,
            )?,
            Theorem::BesselLog => {
                eval_bessel_log_theorem(&BesselLogParams { m, v: get("v", 0.0), k, a, upper, weight }, policy)?
            }
            Theorem::BesselPower => eval_bessel_power_theorem(
                &BesselPowerParams { m, v: get("v", 0.0), alpha: get("alpha", 0.0), k, a, upper, weight },
                policy,
            )?,
            Theorem::BesselExp => eval_bessel_exp_theorem(
                &BesselExpParams {
                    m,
                    v: get("v", 0.0),
                    alpha: get("alpha", 0.0),
                    f: get("f", 0.0),
                    g: get("g", 0.0),
                    c: get("c", 0.0),
                    p: get("p", 0.0),
                    d: get("d", 0.0),
                    k,
                    a,
                    upper,
                    weight,
                },
                policy,
            )?,
        };
        let scale = get("scale", 1.0);
        Ok(SeriesResult {
            value: sum.value * scale,
            tail_estimate: sum.tail_estimate * scale.norm(),
            ..sum
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_and_parses_back() {
        let text = "general_binomial(m=sub(p, 1), k=0, coeff1=-1, exp1=1, outer1=sub(q, 1), weight=loglog)";
        let s = SeriesSpec::parse(text).unwrap();
        assert_eq!(s.to_string(), text);
    }

    #[test]
    fn rejects_unknown_and_missing_bindings() {
        assert!(matches!(SeriesSpec::parse("main(m=1, b=1)"), Err(Error::ParseError { .. })));
        assert!(matches!(SeriesSpec::parse("main(m=1, b=1, c=1, q=2)"), Err(Error::ParseError { .. })));
        assert!(matches!(
            SeriesSpec::parse("general_binomial(m=1, coeff1=1, exp1=1)"),
            Err(Error::ParseError { .. })
        ));
        assert!(matches!(SeriesSpec::parse("main(m=1, b=1, c=1, weight=log)"), Err(Error::ParseError { .. })));
    }

    #[test]
    fn malmsten_series_value() {
        // ∫_0^1 log(-log t)/(1+t) dt = -log²2/2
        let s = SeriesSpec::parse("main(m=1, k=0, b=1, c=1, weight=loglog)").unwrap();
        let v = s.evaluate(&BTreeMap::new(), &AccuracyPolicy::default()).unwrap();
        let exact = -std::f64::consts::LN_2.powi(2) / 2.0;
        assert!((v.value.re - exact).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn scale_multiplies_the_series() {
        let params: BTreeMap<String, C64> = [("s".to_string(), C64::new(2.0, 0.0))].into();
        let s = SeriesSpec::parse("main(m=s, k=1, b=mul(2, s), c=1, scale=pow(s, 2))").unwrap();
        let v = s.evaluate(&params, &AccuracyPolicy::default()).unwrap();
        assert!((v.value.re - crate::special_functions::constants::CATALAN).abs() < 1e-12, "{}", v.value);
    }
}
