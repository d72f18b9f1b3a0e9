//! Left-hand sides: sums of products of factor tokens over an interval.
//!
//! ```text
//! pow(x, sub(m, 1)) * logpow(a, k) * binom(c, b, -1); interval(1)
//! binom(-1, 1, sub(q, 1)) * pow(x, sub(p, 1)) + const(-1) * logpow(1, sub(q, 1)); interval(1)
//! fx(log(div(add(pow(add(x, b), 2), 1), add(pow(sub(x, b), 2), 1)))) * fx(sin(x)); interval(0, inf); oscillatory(1)
//! ```
//!
//! Terms are separated by `+`, factors by `*`, and the trailing `;`-separated
//! attributes give the interval, interior singular points and, for infinite
//! intervals, the oscillation frequency.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use super::expr::{complex_pow, eval, parse_expr, Expr, Scope, INTEGRATION_VARIABLE};
use super::lexer::{Cursor, Tok};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_finite, integrate_semi_infinite_oscillatory, EndpointBehavior, IntegrandHandle, Node,
    QuadratureResult,
};
use crate::special_functions::{bessel_j, hypergeometric_pfq, lerch_phi};
use crate::summation::AccuracyPolicy;
use crate::util::expm1;

/// One multiplicative factor of an integrand term.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// x^e
    Power(Expr),
    /// (-log(a x))^k
    LogPower { a: Expr, k: Expr },
    /// log(log(1/(a x)))
    LogLogRecip { a: Expr },
    /// (1 + coeff x^exponent)^outer
    Binomial { coeff: Expr, exponent: Expr, outer: Expr },
    /// J_v(scale x)
    BesselJ { v: Expr, scale: Expr },
    /// J_v(scale x) J_mu(scale x)
    BesselProduct { v: Expr, mu: Expr, scale: Expr },
    /// ₂F₁(a, b; c; scale x)
    Hypergeometric2F1 { a: Expr, b: Expr, c: Expr, scale: Expr },
    /// Φ(x, s, v)
    Lerch { s: Expr, v: Expr },
    /// e^{f x^g}
    Exponential { f: Expr, g: Expr },
    /// atanh(beta x)
    Atanh { beta: Expr },
    /// log(1 + c x^s)
    Log1p { c: Expr, s: Expr },
    /// A factor independent of x.
    Constant(Expr),
    /// Any expression in x.
    General(Expr),
}

/// Integrand as a sum of products of factors over [lower, upper].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandSpec {
    pub terms: Vec<Vec<Factor>>,
    pub lower: Expr,
    /// `None` is +∞, which requires an oscillation frequency.
    pub upper: Option<Expr>,
    pub singular_points: Vec<Expr>,
    pub oscillation: Option<Expr>,
}

impl Factor {
    fn name(&self) -> &'static str {
        match self {
            Factor::Power(_) => "pow",
            Factor::LogPower { .. } => "logpow",
            Factor::LogLogRecip { .. } => "loglogrecip",
            Factor::Binomial { .. } => "binom",
            Factor::BesselJ { .. } => "besselj",
            Factor::BesselProduct { .. } => "besselprod",
            Factor::Hypergeometric2F1 { .. } => "f21",
            Factor::Lerch { .. } => "lerch",
            Factor::Exponential { .. } => "expf",
            Factor::Atanh { .. } => "atanh",
            Factor::Log1p { .. } => "log1p",
            Factor::Constant(_) => "const",
            Factor::General(_) => "fx",
        }
    }

    fn args(&self) -> Vec<&Expr> {
        match self {
            Factor::Power(e) | Factor::Constant(e) | Factor::General(e) => vec![e],
            Factor::LogPower { a, k } => vec![a, k],
            Factor::LogLogRecip { a } => vec![a],
            Factor::Binomial { coeff, exponent, outer } => vec![coeff, exponent, outer],
            Factor::BesselJ { v, scale } => vec![v, scale],
            Factor::BesselProduct { v, mu, scale } => vec![v, mu, scale],
            Factor::Hypergeometric2F1 { a, b, c, scale } => vec![a, b, c, scale],
            Factor::Lerch { s, v } => vec![s, v],
            Factor::Exponential { f, g } => vec![f, g],
            Factor::Atanh { beta } => vec![beta],
            Factor::Log1p { c, s } => vec![c, s],
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name())?;
        if matches!(self, Factor::Power(_)) {
            write!(f, "{INTEGRATION_VARIABLE}, ")?;
        }
        for (i, a) in self.args().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for IntegrandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, term) in self.terms.iter().enumerate() {
            if t > 0 {
                f.write_str(" + ")?;
            }
            for (i, factor) in term.iter().enumerate() {
                if i > 0 {
                    f.write_str(" * ")?;
                }
                write!(f, "{factor}")?;
            }
        }
        match (&self.lower, &self.upper) {
            (Expr::Num(z), Some(u)) if *z == 0.0 && z.is_sign_positive() => write!(f, "; interval({u})")?,
            (lo, Some(u)) => write!(f, "; interval({lo}, {u})")?,
            (lo, None) => write!(f, "; interval({lo}, inf)")?,
        }
        if !self.singular_points.is_empty() {
            f.write_str("; singular(")?;
            for (i, p) in self.singular_points.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        if let Some(w) = &self.oscillation {
            write!(f, "; oscillatory({w})")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_integrand(cur: &mut Cursor) -> Result<IntegrandSpec> {
    let mut terms = vec![Vec::new()];
    loop {
        let factor = parse_factor(cur)?;
        terms.last_mut().expect("at least one term").push(factor);
        if cur.eat(&Tok::Star) {
            continue;
        }
        if cur.eat(&Tok::Plus) {
            terms.push(Vec::new());
            continue;
        }
        break;
    }
    let mut interval: Option<(Expr, Option<Expr>)> = None;
    let mut singular_points = Vec::new();
    let mut oscillation = None;
    while cur.eat(&Tok::Semicolon) {
        let column = cur.column();
        let name = cur.ident("interval, singular or oscillatory")?;
        cur.expect(Tok::LParen, "'('")?;
        match name.as_str() {
            "interval" if interval.is_none() => {
                let first = parse_bound(cur)?;
                let bounds = if cur.eat(&Tok::Comma) {
                    let second = parse_bound(cur)?;
                    let lower = first.ok_or_else(|| cur.error_at(column, "lower limit cannot be inf"))?;
                    (lower, second)
                } else {
                    let upper = first.ok_or_else(|| cur.error_at(column, "interval(inf) needs a lower limit"))?;
                    (Expr::Num(0.0), Some(upper))
                };
                interval = Some(bounds);
            }
            "singular" if singular_points.is_empty() => {
                loop {
                    singular_points.push(parse_expr(cur)?);
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "oscillatory" if oscillation.is_none() => oscillation = Some(parse_expr(cur)?),
            "interval" | "singular" | "oscillatory" => {
                return Err(cur.error_at(column, format!("{name} given twice")));
            }
            _ => return Err(cur.error_at(column, format!("unknown integrand attribute '{name}'"))),
        }
        cur.expect(Tok::RParen, "')'")?;
    }
    let (lower, upper) = interval.unwrap_or((Expr::Num(0.0), Some(Expr::Num(1.0))));
    Ok(IntegrandSpec {
        terms,
        lower,
        upper,
        singular_points,
        oscillation,
    })
}

fn parse_bound(cur: &mut Cursor) -> Result<Option<Expr>> {
    if cur.peek() == Some(&Tok::Ident("inf".into())) && cur.peek_at(1) != Some(&Tok::LParen) {
        cur.next();
        return Ok(None);
    }
    parse_expr(cur).map(Some)
}

fn parse_factor(cur: &mut Cursor) -> Result<Factor> {
    let column = cur.column();
    let name = cur.ident("an integrand factor")?;
    cur.expect(Tok::LParen, "'('")?;
    if name == "pow" {
        let var = cur.ident("x")?;
        if var != INTEGRATION_VARIABLE {
            return Err(cur.error_at(column, "pow factor must read pow(x, exponent)"));
        }
        cur.expect(Tok::Comma, "','")?;
    }
    let mut args = Vec::new();
    if cur.peek() != Some(&Tok::RParen) {
        loop {
            args.push(parse_expr(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cur.expect(Tok::RParen, "')'")?;
    let arity = match name.as_str() {
        "pow" | "loglogrecip" | "atanh" | "const" | "fx" => 1,
        "logpow" | "besselj" | "lerch" | "expf" | "log1p" => 2,
        "binom" | "besselprod" => 3,
        "f21" => 4,
        _ => return Err(cur.error_at(column, format!("unknown integrand factor '{name}'"))),
    };
    if args.len() != arity {
        return Err(cur.error_at(column, format!("{name} takes {arity} arguments, got {}", args.len())));
    }
    let mut it = args.into_iter();
    let mut next = || it.next().expect("arity checked");
    Ok(match name.as_str() {
        "pow" => Factor::Power(next()),
        "logpow" => Factor::LogPower { a: next(), k: next() },
        "loglogrecip" => Factor::LogLogRecip { a: next() },
        "binom" => Factor::Binomial {
            coeff: next(),
            exponent: next(),
            outer: next(),
        },
        "besselj" => Factor::BesselJ { v: next(), scale: next() },
        "besselprod" => Factor::BesselProduct {
            v: next(),
            mu: next(),
            scale: next(),
        },
        "f21" => Factor::Hypergeometric2F1 {
            a: next(),
            b: next(),
            c: next(),
            scale: next(),
        },
        "lerch" => Factor::Lerch { s: next(), v: next() },
        "expf" => Factor::Exponential { f: next(), g: next() },
        "atanh" => Factor::Atanh { beta: next() },
        "log1p" => Factor::Log1p { c: next(), s: next() },
        "const" => Factor::Constant(next()),
        _ => Factor::General(next()),
    })
}

impl IntegrandSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text, 1, 1)?;
        let spec = parse_integrand(&mut cur)?;
        cur.finish()?;
        Ok(spec)
    }

    /// Parameters referenced anywhere in the integrand.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut add = |e: &Expr, allow_x: bool| {
            for v in e.free_variables() {
                if !(allow_x && v == INTEGRATION_VARIABLE) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        for factor in self.terms.iter().flatten() {
            let allow_x = matches!(factor, Factor::General(_));
            for a in factor.args() {
                add(a, allow_x);
            }
        }
        add(&self.lower, false);
        if let Some(u) = &self.upper {
            add(u, false);
        }
        for p in &self.singular_points {
            add(p, false);
        }
        if let Some(w) = &self.oscillation {
            add(w, false);
        }
        out
    }

    pub fn uses_numerical_derivative(&self) -> bool {
        self.terms
            .iter()
            .flatten()
            .any(|f| f.args().into_iter().any(Expr::uses_numerical_derivative))
    }
}

/// A factor with its parameters evaluated.
#[derive(Debug, Clone)]
enum Bound {
    Power(C64),
    LogPower { log_a: C64, unit_a: bool, k: C64 },
    LogLog { log_a: C64, unit_a: bool },
    Binomial { coeff: C64, exponent: C64, outer: C64 },
    BesselJ { v: C64, scale: C64 },
    BesselProduct { v: C64, mu: C64, scale: C64 },
    Hypergeometric2F1 { a: C64, b: C64, c: C64, scale: C64 },
    Lerch { s: C64, v: C64 },
    Exponential { f: C64, g: C64 },
    Atanh { beta: C64 },
    Log1p { c: C64, s: C64 },
    Constant(C64),
    General(Expr),
}

fn cc(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn bind(factor: &Factor, scope: &mut Scope) -> Result<Bound> {
    let mut ev = |e: &Expr| eval(e, scope);
    Ok(match factor {
        Factor::Power(e) => Bound::Power(ev(e)?),
        Factor::LogPower { a, k } => {
            let a = ev(a)?;
            Bound::LogPower {
                log_a: log_nonzero(a)?,
                unit_a: a == cc(1.0),
                k: ev(k)?,
            }
        }
        Factor::LogLogRecip { a } => {
            let a = ev(a)?;
            Bound::LogLog {
                log_a: log_nonzero(a)?,
                unit_a: a == cc(1.0),
            }
        }
        Factor::Binomial { coeff, exponent, outer } => Bound::Binomial {
            coeff: ev(coeff)?,
            exponent: ev(exponent)?,
            outer: ev(outer)?,
        },
        Factor::BesselJ { v, scale } => Bound::BesselJ {
            v: ev(v)?,
            scale: ev(scale)?,
        },
        Factor::BesselProduct { v, mu, scale } => Bound::BesselProduct {
            v: ev(v)?,
            mu: ev(mu)?,
            scale: ev(scale)?,
        },
        Factor::Hypergeometric2F1 { a, b, c, scale } => Bound::Hypergeometric2F1 {
            a: ev(a)?,
            b: ev(b)?,
            c: ev(c)?,
            scale: ev(scale)?,
        },
        Factor::Lerch { s, v } => Bound::Lerch { s: ev(s)?, v: ev(v)? },
        Factor::Exponential { f, g } => Bound::Exponential { f: ev(f)?, g: ev(g)? },
        Factor::Atanh { beta } => Bound::Atanh { beta: ev(beta)? },
        Factor::Log1p { c, s } => Bound::Log1p { c: ev(c)?, s: ev(s)? },
        Factor::Constant(e) => Bound::Constant(ev(e)?),
        Factor::General(e) => Bound::General(e.clone()),
    })
}

fn log_nonzero(a: C64) -> Result<C64> {
    if a.norm() == 0.0 {
        Err(Error::domain("logarithm scale a must be non-zero"))
    } else {
        Ok(a.ln())
    }
}

/// x^e at a node, through log x so that tiny x keep full precision.
fn node_power(ln_x: f64, e: C64) -> C64 {
    if e == cc(0.0) {
        cc(1.0)
    } else {
        (e * ln_x).exp()
    }
}

/// log(1 + w) without cancellation for small w.
fn ln_1p(w: C64) -> C64 {
    let u = cc(1.0) + w;
    if u == cc(1.0) {
        w
    } else {
        u.ln() * w / (u - 1.0)
    }
}

/// -log(a x), measured from the root x = 1/a when a piece of the interval
/// ends there so that the gap to the root keeps full precision.
fn neg_log_ax(log_a: C64, unit_a: bool, node: &Node, ln_x: f64) -> C64 {
    if unit_a {
        return cc(-ln_x);
    }
    if log_a.im == 0.0 {
        let root = (-log_a.re).exp();
        let near = |end: f64| (end - root).abs() <= 4.0 * f64::EPSILON * root;
        let gap = if near(node.upper) {
            Some(-node.to_upper)
        } else if near(node.lower) {
            Some(node.from_lower)
        } else {
            None
        };
        if let Some(gap) = gap.filter(|g| g.abs() < 0.5 * root) {
            return cc(-(gap / root).ln_1p());
        }
    }
    canonical(-(log_a + ln_x))
}

fn canonical(z: C64) -> C64 {
    if z.im == 0.0 {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

struct Evaluator {
    terms: Vec<Vec<Bound>>,
    params: BTreeMap<String, C64>,
    policy: AccuracyPolicy,
}

impl Evaluator {
    fn factor(&self, f: &Bound, node: &Node, x: f64, ln_x: f64) -> Result<C64> {
        let policy = &self.policy;
        Ok(match f {
            Bound::Power(e) => node_power(ln_x, *e),
            Bound::LogPower { log_a, unit_a, k } => {
                if *k == cc(0.0) {
                    return Ok(cc(1.0));
                }
                complex_pow(neg_log_ax(*log_a, *unit_a, node, ln_x), *k)?
            }
            Bound::LogLog { log_a, unit_a } => {
                let l = neg_log_ax(*log_a, *unit_a, node, ln_x);
                if l.norm() == 0.0 {
                    return Err(Error::domain("log(0) at the root of the logarithm"));
                }
                l.ln()
            }
            Bound::Binomial { coeff, exponent, outer } => {
                let base = if *coeff == cc(-1.0) {
                    -expm1(*exponent * ln_x)
                } else {
                    cc(1.0) + coeff * node_power(ln_x, *exponent)
                };
                complex_pow(canonical(base), *outer)?
            }
            Bound::BesselJ { v, scale } => bessel_j(*v, scale * x, policy)?,
            Bound::BesselProduct { v, mu, scale } => {
                bessel_j(*v, scale * x, policy)? * bessel_j(*mu, scale * x, policy)?
            }
            Bound::Hypergeometric2F1 { a, b, c, scale } => hypergeometric_pfq(&[*a, *b], &[*c], scale * x, policy)?,
            Bound::Lerch { s, v } => lerch_phi(cc(x), *s, *v, policy)?,
            Bound::Exponential { f, g } => (f * node_power(ln_x, *g)).exp(),
            Bound::Atanh { beta } => {
                let z = beta * x;
                (ln_1p(z) - ln_1p(-z)) / 2.0
            }
            Bound::Log1p { c, s } => ln_1p(c * node_power(ln_x, *s)),
            Bound::Constant(v) => *v,
            Bound::General(e) => {
                let mut scope = Scope::new(&self.params, policy);
                scope.at_node(*node);
                eval(e, &mut scope)?
            }
        })
    }

    fn evaluate(&self, node: &Node) -> C64 {
        let x = node.x_exact();
        let ln_x = node.ln_x();
        let mut total = cc(0.0);
        for term in &self.terms {
            let mut product = cc(1.0);
            for f in term {
                match self.factor(f, node, x, ln_x) {
                    Ok(v) => product *= v,
                    Err(_) => return C64::new(f64::NAN, f64::NAN),
                }
                if product == cc(0.0) {
                    break;
                }
            }
            total += product;
        }
        total
    }
}

/// The interval and oscillation data of a realized integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub lower: f64,
    /// `None` is +∞.
    pub upper: Option<f64>,
    pub frequency: Option<f64>,
}

fn real_value(e: &Expr, scope: &mut Scope, what: &str) -> Result<f64> {
    let v = eval(e, scope)?;
    if v.im != 0.0 || !v.re.is_finite() {
        return Err(Error::EvaluationError {
            path: what.to_string(),
            message: format!("expected a finite real number, got {v}"),
        });
    }
    Ok(v.re)
}

pub fn limits(spec: &IntegrandSpec, params: &BTreeMap<String, C64>) -> Result<Limits> {
    let policy = AccuracyPolicy::from_env();
    let mut scope = Scope::new(params, &policy);
    let lower = real_value(&spec.lower, &mut scope, "interval")?;
    let upper = spec
        .upper
        .as_ref()
        .map(|u| real_value(u, &mut scope, "interval"))
        .transpose()?;
    let frequency = spec
        .oscillation
        .as_ref()
        .map(|w| real_value(w, &mut scope, "oscillatory"))
        .transpose()?;
    Ok(Limits {
        lower,
        upper,
        frequency,
    })
}

/// Pointwise evaluator for the integrand with every parameter bound.
/// Logarithms and powers are taken on principal branches; interior singular
/// points, including roots of the logarithms inside the interval, are
/// recorded on the handle so quadrature splits there.
pub fn realize_integrand(spec: &IntegrandSpec, params: &BTreeMap<String, C64>) -> Result<IntegrandHandle> {
    realize_with_policy(spec, params, &AccuracyPolicy::from_env())
}

pub fn realize_with_policy(
    spec: &IntegrandSpec,
    params: &BTreeMap<String, C64>,
    policy: &AccuracyPolicy,
) -> Result<IntegrandHandle> {
    let mut scope = Scope::new(params, policy);
    let mut terms = Vec::with_capacity(spec.terms.len());
    for term in &spec.terms {
        terms.push(term.iter().map(|f| bind(f, &mut scope)).collect::<Result<Vec<_>>>()?);
    }
    let mut singular = Vec::new();
    for p in &spec.singular_points {
        singular.push(real_value(p, &mut scope, "singular")?);
    }
    for f in terms.iter().flatten() {
        if let Bound::LogPower { log_a, .. } | Bound::LogLog { log_a, .. } = f {
            if log_a.im == 0.0 && log_a.re != 0.0 {
                let root = (-log_a.re).exp();
                if !singular.contains(&root) {
                    singular.push(root);
                }
            }
        }
    }
    let behavior = endpoint_behavior(&terms);
    let evaluator = Evaluator {
        terms,
        params: params.clone(),
        policy: *policy,
    };
    let mut handle = IntegrandHandle::new(move |node| evaluator.evaluate(node)).with_singular_points(singular);
    if let Some(b) = behavior {
        handle = handle.with_endpoint_behavior(b);
    }
    Ok(handle)
}

/// Leading power of x at the origin, when every factor's behaviour there is
/// known.
fn endpoint_behavior(terms: &[Vec<Bound>]) -> Option<EndpointBehavior> {
    let mut exponent = f64::INFINITY;
    let mut log_power = f64::NEG_INFINITY;
    for term in terms {
        let mut alpha = 0.0;
        let mut logs = 0.0;
        for f in term {
            match f {
                Bound::Power(e) => alpha += e.re,
                Bound::LogPower { k, .. } => logs += k.re,
                Bound::Binomial { exponent, .. } | Bound::Exponential { g: exponent, .. } if exponent.re > 0.0 => {}
                Bound::BesselJ { v, .. } => alpha += v.re,
                Bound::BesselProduct { v, mu, .. } => alpha += v.re + mu.re,
                Bound::Atanh { .. } => alpha += 1.0,
                Bound::Log1p { s, .. } if s.re > 0.0 => alpha += s.re,
                Bound::LogLog { .. } | Bound::Hypergeometric2F1 { .. } | Bound::Lerch { .. } | Bound::Constant(_) => {}
                _ => return None,
            }
        }
        if alpha < exponent {
            exponent = alpha;
            log_power = logs;
        }
    }
    exponent.is_finite().then_some(EndpointBehavior {
        algebraic_exponent_at_zero: exponent,
        log_power_at_zero: log_power,
        log_power_at_roots: 0.0,
    })
}

/// Integrate the left-hand side numerically.
pub fn integrate_lhs(
    spec: &IntegrandSpec,
    params: &BTreeMap<String, C64>,
    policy: &AccuracyPolicy,
) -> Result<QuadratureResult> {
    let lim = limits(spec, params)?;
    let handle = realize_with_policy(spec, params, policy)?;
    match (lim.upper, lim.frequency) {
        (Some(upper), _) => integrate_finite(&handle, lim.lower, upper, policy),
        (None, Some(w)) if lim.lower == 0.0 => integrate_semi_infinite_oscillatory(&handle, w, policy),
        (None, Some(_)) => Err(Error::UnsupportedDomain(
            "oscillatory integrals must start at 0".into(),
        )),
        (None, None) => Err(Error::UnsupportedDomain(
            "infinite interval without an oscillation frequency".into(),
        )),
    }
}
