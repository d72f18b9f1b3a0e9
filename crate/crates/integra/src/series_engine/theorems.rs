//! Series representations of the parametric integral families.
//!
//! Each family expands its non-logarithmic factors into powers of x and
//! integrates term by term against the log-power kernel. Multiple sums are
//! enumerated diagonal by diagonal (all multi-indices of equal total degree)
//! so that the outer sequence handed to the summation driver is ordered by
//! decreasing magnitude.
//!
//! Families whose integrand carries log^k(a x) rather than (-log(a x))^k use
//! log^k(a x) = e^{iπk} (-log(a x))^k, valid while a x < 1 on the path (and for
//! every integer k). Their log-log weight multiplies the integrand by
//! log(-log(a x)), which keeps the Malmsten-type integrals real.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::kernel::{log_power_kernel, LogWeight};
use crate::error::{Error, Result};
use crate::special_functions::{binomial_general, pochhammer, rgamma};
use crate::special_functions::gamma::nonpositive_integer;
use crate::summation::{sum_series, AccuracyPolicy, SeriesSum};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn one() -> C64 {
    c(1.0)
}

/// e^{iπk}, the factor converting (-log(a x))^k into log^k(a x).
fn log_rotation(k: C64) -> C64 {
    (C64::new(0.0, PI) * k).exp()
}

/// base^e on the principal branch, with 0^0 = 1 and 0^e = 0 for Re e > 0.
fn power(base: C64, e: C64) -> Result<C64> {
    if base.norm() != 0.0 {
        return Ok(base.powc(e));
    }
    if e.norm() == 0.0 {
        Ok(one())
    } else if e.re > 0.0 {
        Ok(c(0.0))
    } else {
        Err(Error::domain(format!("0^{e} is undefined")))
    }
}

fn scale(mut s: SeriesSum, factor: C64) -> SeriesSum {
    s.value *= factor;
    s.tail_estimate *= factor.norm();
    s
}

/// Coefficients C(n, j) b^j, j = 0..=n, of the polynomial (1 + b x)^n.
fn polynomial_coefficients(n: u32, b: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut b_pow = one();
    for j in 0..=n as usize {
        out.push(binomial_general(c(n as f64), j) * b_pow);
        b_pow *= b;
    }
    out
}

/// Sum over all multi-indices of `dims` non-negative integers, grouped by
/// total degree. `term` returns `None` for multi-indices with a vanishing
/// coefficient, which are then neither evaluated nor counted.
fn sum_diagonals<F>(dims: usize, mut term: F, policy: &AccuracyPolicy, context: &str) -> Result<SeriesSum>
where
    F: FnMut(&[usize]) -> Option<Result<C64>>,
{
    let mut index = vec![0usize; dims];
    sum_series(
        |degree| {
            let mut acc = c(0.0);
            let mut count = 0usize;
            visit_diagonal(&mut index, 0, degree, &mut |idx| {
                if let Some(t) = term(idx) {
                    let t = t?;
                    count += 1;
                    acc += t;
                }
                Ok(())
            })?;
            Ok((acc, count.max(1)))
        },
        policy,
        context,
    )
}

fn visit_diagonal<F>(index: &mut [usize], pos: usize, remaining: usize, f: &mut F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if pos + 1 == index.len() {
        index[pos] = remaining;
        return f(index);
    }
    for j in 0..=remaining {
        index[pos] = j;
        visit_diagonal(index, pos + 1, remaining - j, f)?;
    }
    Ok(())
}

/// Lazily extended table of per-index coefficients.
struct CoefficientTable<F: FnMut(usize, C64) -> C64> {
    values: Vec<C64>,
    next: F,
}

impl<F: FnMut(usize, C64) -> C64> CoefficientTable<F> {
    /// `next(j, previous)` returns the coefficient of index j from that of j-1.
    fn new(first: C64, next: F) -> Self {
        Self {
            values: vec![first],
            next,
        }
    }

    fn get(&mut self, j: usize) -> C64 {
        while self.values.len() <= j {
            let n = self.values.len();
            let prev = self.values[n - 1];
            let v = (self.next)(n, prev);
            self.values.push(v);
        }
        self.values[j]
    }
}

/// Radius, relative to the distance from k to the pole of Γ(k+1) at k = -1,
/// and node count of the circle on which log-log fallbacks differentiate.
const K_CIRCLE_RADIUS: f64 = 0.2;
const K_CIRCLE_NODES: usize = 16;

/// Evaluate a family at the requested weight; when a log-log series fails to
/// converge, differentiate the power-weighted series in k instead, since
/// (-log(a x))^k log(-log(a x)) = ∂_k (-log(a x))^k. Log-log terms decay like
/// n^{-p} log n, which sequence transformations barely accelerate, while the
/// power-weighted terms decay like n^{-p} and extrapolate cleanly.
///
/// The power-weighted sum is analytic in k, so the derivative is the Cauchy
/// integral over a circle around k, whose trapezoid rule converges
/// geometrically and divides the summation error only by the radius. The
/// power-weighted log-binomial sum is singular only at k = -1, where both
/// Γ(k+1) and the n^{-(k+2)} decay of its terms fail.
fn with_log_log_fallback(
    weight: LogWeight,
    k: C64,
    eval: impl Fn(LogWeight, C64) -> Result<SeriesSum>,
) -> Result<SeriesSum> {
    match eval(weight, k) {
        Err(Error::NonConvergence { .. }) if weight == LogWeight::LogLog => {
            let radius = K_CIRCLE_RADIUS * (k + 1.0).norm().min(1.0);
            let mut value = c(0.0);
            let mut used = 0;
            let mut tail: f64 = 0.0;
            for j in 0..K_CIRCLE_NODES {
                let offset = C64::from_polar(radius, 2.0 * PI * j as f64 / K_CIRCLE_NODES as f64);
                let r = eval(LogWeight::Power, k + offset)?;
                value += r.value / offset;
                used += r.terms_used;
                tail = tail.max(r.tail_estimate);
            }
            Ok(SeriesSum {
                value: value / K_CIRCLE_NODES as f64,
                terms_used: used,
                tail_estimate: tail / radius,
                accelerated: true,
            })
        }
        other => other,
    }
}

/// ∫_0^1 t^{m-1} (-log(a t))^k / (1 + c t^b) dt = Σ_j (-c)^j K(b j + m; a, 1).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MainParams {
    pub m: C64,
    pub k: C64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub weight: LogWeight,
}

pub fn eval_theorem_main(p: &MainParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    if p.c.norm() > 1.0 + 1e-12 {
        return Err(Error::domain(format!("|c| = {} exceeds 1", p.c.norm())));
    }
    let mut coeff = one();
    sum_series(
        |j| {
            if j > 0 {
                coeff *= -p.c;
            }
            if coeff.norm() == 0.0 {
                return Ok((c(0.0), 1));
            }
            let kern = log_power_kernel(p.b * j as f64 + p.m, p.k, p.a, one(), p.weight, policy)?;
            Ok((coeff * kern, 1))
        },
        policy,
        "main log-power series",
    )
}

/// ∫_0^1 x^m (1 + b x)^n (-log(a x))^k dx for integer n ≥ 1, a finite sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolynomialParams {
    pub m: C64,
    pub b: C64,
    pub n: u32,
    pub k: C64,
    pub a: C64,
    pub weight: LogWeight,
}

pub fn eval_polynomial_theorem(p: &PolynomialParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    if p.n == 0 {
        return Err(Error::domain("the polynomial family needs a degree n >= 1"));
    }
    let coeffs = polynomial_coefficients(p.n, p.b);
    let mut value = c(0.0);
    for (j, coef) in coeffs.iter().enumerate() {
        value += coef * log_power_kernel(p.m + (j + 1) as f64, p.k, p.a, one(), p.weight, policy)?;
    }
    Ok(SeriesSum {
        value,
        terms_used: coeffs.len(),
        tail_estimate: 0.0,
        accelerated: false,
    })
}

/// A factor (1 + coeff x^exponent)^outer of a general binomial integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialFactor {
    pub coeff: C64,
    pub exponent: C64,
    pub outer: C64,
}

/// ∫_0^b x^m Π_l (1 + coeff_l x^{e_l})^{outer_l} (-log(a x))^k dx.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneralBinomialParams {
    pub m: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub factors: Vec<BinomialFactor>,
    pub weight: LogWeight,
}

/// Σ over multi-indices of Π_l C(outer_l, j_l) coeff_l^{j_l} K(1 + m + Σ e_l j_l; a, b).
pub fn eval_general_binomial(p: &GeneralBinomialParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    if p.factors.is_empty() {
        let kern = log_power_kernel(p.m + 1.0, p.k, p.a, p.upper, p.weight, policy)?;
        return Ok(SeriesSum {
            value: kern,
            terms_used: 1,
            tail_estimate: 0.0,
            accelerated: false,
        });
    }
    for f in &p.factors {
        let terminating = matches!(nonpositive_integer(-f.outer), Some(_));
        let reach = (f.coeff * p.upper.powc(f.exponent)).norm();
        if !terminating && reach > 1.0 + 1e-12 {
            return Err(Error::domain(format!(
                "|coeff * b^exponent| = {reach} exceeds 1 for factor with outer power {}",
                f.outer
            )));
        }
    }
    let mut tables: Vec<_> = p
        .factors
        .iter()
        .map(|f| {
            let (outer, coeff) = (f.outer, f.coeff);
            CoefficientTable::new(one(), move |j, prev| prev * (outer - (j - 1) as f64) / j as f64 * coeff)
        })
        .collect();
    let base = p.m + 1.0;
    sum_diagonals(
        p.factors.len(),
        |idx| {
            let mut coef = one();
            let mut exponent = base;
            for (l, &j) in idx.iter().enumerate() {
                coef *= tables[l].get(j);
                exponent += p.factors[l].exponent * j as f64;
            }
            if coef.norm() == 0.0 {
                return None;
            }
            Some(log_power_kernel(exponent, p.k, p.a, p.upper, p.weight, policy).map(|kern| coef * kern))
        },
        policy,
        "general binomial series",
    )
}

/// ∫_0^b x^m (1 + z x^c)^{-d} (-log(a x))^k dx = Σ_j C(-d, j) z^j K(1 + c j + m; a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FiniteIntervalParams {
    pub m: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub c: C64,
    pub z: C64,
    pub d: C64,
    pub weight: LogWeight,
}

pub fn eval_finite_interval(p: &FiniteIntervalParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    eval_general_binomial(
        &GeneralBinomialParams {
            m: p.m,
            k: p.k,
            a: p.a,
            upper: p.upper,
            factors: vec![BinomialFactor {
                coeff: p.z,
                exponent: p.c,
                outer: -p.d,
            }],
            weight: p.weight,
        },
        policy,
    )
}

/// ∫_0^1 x^{m-1} log(1 + c x^b) (-log(a x))^k dx
///   = Σ_j (-1)^j c^{j+1}/(j+1) K(b(j+1) + m; a, 1).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogBinomialParams {
    pub m: C64,
    pub k: C64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub weight: LogWeight,
}

pub fn eval_log_binomial_family(p: &LogBinomialParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    if p.c.norm() > 1.0 + 1e-12 {
        return Err(Error::domain(format!("|c| = {} exceeds 1", p.c.norm())));
    }
    with_log_log_fallback(p.weight, p.k, |weight, k| {
        eval_log_binomial_with(&LogBinomialParams { weight, k, ..*p }, policy)
    })
}

fn eval_log_binomial_with(p: &LogBinomialParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let mut c_pow = one();
    sum_series(
        |j| {
            c_pow *= p.c;
            if c_pow.norm() == 0.0 {
                return Ok((c(0.0), 1));
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let n = (j + 1) as f64;
            let kern = log_power_kernel(p.b * n + p.m, p.k, p.a, one(), p.weight, policy)?;
            Ok((sign * c_pow / n * kern, 1))
        },
        policy,
        "log-binomial series",
    )
}

/// ∫_0^1 x^m (1 + b x)^n J_v(z x) (-log(a x))^k dx for integer n ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BesselParams {
    pub m: C64,
    pub b: C64,
    pub n: u32,
    pub v: C64,
    pub z: C64,
    pub k: C64,
    pub a: C64,
    pub weight: LogWeight,
}

pub fn eval_bessel_theorem(p: &BesselParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let poly = polynomial_coefficients(p.n, p.b);
    let half = p.z / 2.0;
    let q = -half * half;
    let prefactor = power(half, p.v)?;
    let mut ratio = one();
    sum_series(
        |l| {
            let lf = l as f64;
            if l > 0 {
                ratio *= q / lf;
            }
            let weight = prefactor * ratio * rgamma(p.v + lf + 1.0);
            let mut acc = c(0.0);
            for (j, coef) in poly.iter().enumerate() {
                let exponent = (j + 1) as f64 + 2.0 * lf + p.m + p.v;
                acc += coef * log_power_kernel(exponent, p.k, p.a, one(), p.weight, policy)?;
            }
            Ok((weight * acc, poly.len()))
        },
        policy,
        "Bessel series",
    )
}

/// ∫_0^1 x^m (1 + b x)^n J_v(z x) J_μ(z x) (-log(a x))^k dx for integer n ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BesselProductParams {
    pub m: C64,
    pub b: C64,
    pub n: u32,
    pub v: C64,
    pub mu: C64,
    pub z: C64,
    pub k: C64,
    pub a: C64,
    pub weight: LogWeight,
}

pub fn eval_bessel_product_theorem(p: &BesselProductParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let poly = polynomial_coefficients(p.n, p.b);
    let half = p.z / 2.0;
    let nu = p.v + p.mu;
    let prefactor = power(half, nu)?;
    sum_series(
        |l| {
            let lf = l as f64;
            // (-1)^l (z/2)^{2l} (l+v+μ+1)_l / (l! Γ(l+v+1) Γ(l+μ+1))
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let weight = sign
                * prefactor
                * half.powi(2 * l as i32)
                * pochhammer(nu + lf + 1.0, l)
                * rgamma(c(lf + 1.0))
                * rgamma(p.v + lf + 1.0)
                * rgamma(p.mu + lf + 1.0);
            let mut acc = c(0.0);
            for (j, coef) in poly.iter().enumerate() {
                let exponent = (j + 1) as f64 + 2.0 * lf + p.m + nu;
                acc += coef * log_power_kernel(exponent, p.k, p.a, one(), p.weight, policy)?;
            }
            Ok((weight * acc, poly.len()))
        },
        policy,
        "Bessel product series",
    )
}

/// ∫_0^1 e^{s x} x^m (1 + b x)^n 2F1(α, β; γ; z x) log^k(a x) dx for integer n ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpBinomial2F1Params {
    pub m: C64,
    pub b: C64,
    pub n: u32,
    pub s: C64,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub z: C64,
    pub k: C64,
    pub a: C64,
    pub weight: LogWeight,
}

pub fn eval_exp_binomial_2f1_theorem(p: &ExpBinomial2F1Params, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    if p.z.norm() > 1.0 + 1e-12 {
        return Err(Error::DomainOutsideUnitDisk(p.z.norm()));
    }
    if let Some(n) = nonpositive_integer(p.gamma) {
        return Err(Error::LowerParameterPole(n as f64));
    }
    let poly = polynomial_coefficients(p.n, p.b);
    let (s, alpha, beta, gam, z) = (p.s, p.alpha, p.beta, p.gamma, p.z);
    let mut exp_coef = CoefficientTable::new(one(), move |h, prev| prev * s / h as f64);
    let mut hyp_coef = CoefficientTable::new(one(), move |l, prev| {
        let m = (l - 1) as f64;
        prev * (alpha + m) * (beta + m) / ((gam + m) * l as f64) * z
    });
    let series = sum_diagonals(
        2,
        |idx| {
            let (h, l) = (idx[0], idx[1]);
            let coef = exp_coef.get(h) * hyp_coef.get(l);
            if coef.norm() == 0.0 {
                return None;
            }
            let mut acc = c(0.0);
            for (j, pc) in poly.iter().enumerate() {
                let exponent = (h + l + j + 1) as f64 + p.m;
                match log_power_kernel(exponent, p.k, p.a, one(), p.weight, policy) {
                    Ok(kern) => acc += pc * kern,
                    Err(e) => return Some(Err(e)),
                }
            }
            Some(Ok(coef * acc))
        },
        policy,
        "exponential-binomial-2F1 series",
    )?;
    Ok(scale(series, log_rotation(p.k)))
}

/// ∫_0^b x^m Φ(x, s, v) (-log(a x))^k dx = Σ_l (l+v)^{-s} K(1 + l + m; a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LerchIntegralParams {
    pub m: C64,
    pub s: C64,
    pub v: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub weight: LogWeight,
}

pub fn eval_lerch_integral_theorem(p: &LerchIntegralParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let reach = p.upper.norm();
    if reach > 1.0 + 1e-12 {
        return Err(Error::domain(format!("upper limit {reach} exceeds the unit disk of Φ")));
    }
    if reach >= 1.0 - 1e-12 && p.s.re <= 0.0 {
        return Err(Error::domain(format!(
            "Φ(x, s, v) is not integrable up to x = 1 for Re(s) = {} <= 0",
            p.s.re
        )));
    }
    if let Some(n) = nonpositive_integer(p.v) {
        return Err(Error::PoleAtNonpositiveInteger(n as f64));
    }
    sum_series(
        |l| {
            let lf = l as f64;
            let coef = (-p.s * (p.v + lf).ln()).exp();
            let kern = log_power_kernel(p.m + lf + 1.0, p.k, p.a, p.upper, p.weight, policy)?;
            Ok((coef * kern, 1))
        },
        policy,
        "Lerch integral series",
    )
}

/// ∫_0^b x^m 2F1(α, β; γ; x) log^k(a x) dx
///   = e^{iπk} Σ_l (α)_l (β)_l / (l! (γ)_l) K(1 + l + m; a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HypergeometricIntegralParams {
    pub m: C64,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub weight: LogWeight,
}

pub fn eval_hypergeometric_integral_theorem(
    p: &HypergeometricIntegralParams,
    policy: &AccuracyPolicy,
) -> Result<SeriesSum> {
    if p.upper.norm() > 1.0 + 1e-12 {
        return Err(Error::DomainOutsideUnitDisk(p.upper.norm()));
    }
    if let Some(n) = nonpositive_integer(p.gamma) {
        return Err(Error::LowerParameterPole(n as f64));
    }
    let mut coef = one();
    let series = sum_series(
        |l| {
            if l > 0 {
                let m = (l - 1) as f64;
                coef *= (p.alpha + m) * (p.beta + m) / ((p.gamma + m) * l as f64);
            }
            if coef.norm() == 0.0 {
                return Ok((c(0.0), 1));
            }
            let kern = log_power_kernel(p.m + l as f64 + 1.0, p.k, p.a, p.upper, p.weight, policy)?;
            Ok((coef * kern, 1))
        },
        policy,
        "hypergeometric integral series",
    )?;
    Ok(scale(series, log_rotation(p.k)))
}

/// ∫_0^b x^{2m+v} J_v(x) log^k(a x^2) dx
///   = e^{iπk} 2^k Σ_j (-1)^j 2^{-2j-v} / (j! Γ(1+j+v)) K(1 + 2j + 2m + 2v; √a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BesselLogParams {
    pub m: C64,
    pub v: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub weight: LogWeight,
}

pub fn eval_bessel_log_theorem(p: &BesselLogParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let root_a = p.a.sqrt();
    let prefactor = c(2.0).powc(-p.v);
    let mut ratio = one();
    let series = sum_series(
        |j| {
            let jf = j as f64;
            if j > 0 {
                ratio *= -0.25 / jf;
            }
            let weight = prefactor * ratio * rgamma(p.v + jf + 1.0);
            let exponent = 2.0 * jf + 2.0 * p.m + 2.0 * p.v + 1.0;
            let kern = log_power_kernel(exponent, p.k, root_a, p.upper, p.weight, policy)?;
            Ok((weight * kern, 1))
        },
        policy,
        "Bessel-log series",
    )?;
    Ok(scale(series, log_rotation(p.k) * c(2.0).powc(p.k)))
}

/// ∫_0^b x^{m-1} J_v(α x) (-log(a x))^k dx
///   = Σ_j (-1)^j (α/2)^{2j+v} / (j! Γ(1+j+v)) K(2j + m + v; a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BesselPowerParams {
    pub m: C64,
    pub v: C64,
    pub alpha: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub weight: LogWeight,
}

pub fn eval_bessel_power_theorem(p: &BesselPowerParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let half = p.alpha / 2.0;
    let q = -half * half;
    let prefactor = power(half, p.v)?;
    let mut ratio = one();
    sum_series(
        |j| {
            let jf = j as f64;
            if j > 0 {
                ratio *= q / jf;
            }
            let weight = prefactor * ratio * rgamma(p.v + jf + 1.0);
            let kern = log_power_kernel(2.0 * jf + p.m + p.v, p.k, p.a, p.upper, p.weight, policy)?;
            Ok((weight * kern, 1))
        },
        policy,
        "Bessel power series",
    )
}

/// ∫_0^b e^{f x^g} x^m (1 + c x^p)^d J_v(α x) (-log(a x))^k dx
///   = Σ_{j,h,l} (-1)^j (α/2)^{2j+v} f^h c^l C(d, l) / (h! j! Γ(1+j+v))
///     K(1 + g h + 2j + m + l p + v; a, b).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BesselExpParams {
    pub m: C64,
    pub v: C64,
    pub alpha: C64,
    pub f: C64,
    pub g: C64,
    pub c: C64,
    pub p: C64,
    pub d: C64,
    pub k: C64,
    pub a: C64,
    pub upper: C64,
    pub weight: LogWeight,
}

pub fn eval_bessel_exp_theorem(p: &BesselExpParams, policy: &AccuracyPolicy) -> Result<SeriesSum> {
    let terminating = nonpositive_integer(-p.d).is_some();
    let reach = (p.c * p.upper.powc(p.p)).norm();
    if !terminating && reach > 1.0 + 1e-12 {
        return Err(Error::domain(format!("|c b^p| = {reach} exceeds 1")));
    }
    let half = p.alpha / 2.0;
    let (v, f, cc, d) = (p.v, p.f, p.c, p.d);
    let q = -half * half;
    let prefactor = power(half, v)?;
    let mut bessel_ratio = CoefficientTable::new(one(), move |j, prev| prev * q / j as f64);
    let mut exp_coef = CoefficientTable::new(one(), move |h, prev| prev * f / h as f64);
    let mut binom_coef = CoefficientTable::new(one(), move |l, prev| prev * (d - (l - 1) as f64) / l as f64 * cc);
    sum_diagonals(
        3,
        |idx| {
            let (j, h, l) = (idx[0], idx[1], idx[2]);
            let coef = prefactor
                * bessel_ratio.get(j)
                * rgamma(v + j as f64 + 1.0)
                * exp_coef.get(h)
                * binom_coef.get(l);
            if coef.norm() == 0.0 {
                return None;
            }
            let exponent = 1.0 + p.g * h as f64 + 2.0 * j as f64 + p.m + p.p * l as f64 + p.v;
            Some(log_power_kernel(exponent, p.k, p.a, p.upper, p.weight, policy).map(|kern| coef * kern))
        },
        policy,
        "Bessel-exponential series",
    )
}
