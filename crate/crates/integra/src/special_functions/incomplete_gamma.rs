//! Incomplete gamma functions and generalized exponential integrals for
//! complex order and argument, on principal branches.
//!
//! The upper function is computed in the scaled form e^z Γ(s, z), which stays
//! moderate in size when z runs far along the negative real axis. That is the
//! regime of the log-power kernel when the upper integration limit exceeds the
//! point where the logarithm changes sign.

use num_complex::Complex64 as C64;

use super::constants::EULER_GAMMA;
use super::gamma::{c, digamma, gamma, log_gamma_one_plus, nonpositive_integer};
use crate::error::{Error, Result};
use crate::summation::AccuracyPolicy;
use crate::util::{expm1, expm1_over, is_finite, richardson_derivative};

const TINY: f64 = 1e-300;

/// Upper incomplete gamma Γ(s, z) = ∫_z^∞ t^{s-1} e^{-t} dt.
pub fn upper_incomplete_gamma(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    Ok((-z).exp() * upper_gamma_scaled(s, z, policy)?)
}

/// Lower incomplete gamma γ(s, z) = ∫_0^z t^{s-1} e^{-t} dt.
pub fn lower_incomplete_gamma(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if let Some(n) = nonpositive_integer(s) {
        return Err(Error::PoleAtNonpositiveInteger(n as f64));
    }
    if z == c(0.0) {
        return Ok(c(0.0));
    }
    if z.norm() < 30.0_f64.max(s.norm()) {
        let sum = if z.re >= 0.0 {
            (-z).exp() * rising_series(s, z, policy)?
        } else {
            alternating_series(s, z, None, policy)?
        };
        Ok(z.powc(s) * sum)
    } else {
        Ok(gamma(s)? - upper_incomplete_gamma(s, z, policy)?)
    }
}

/// Generalized exponential integral E_n(z) = z^{n-1} Γ(1-n, z).
pub fn expint_e(n: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if z == c(0.0) {
        return Err(Error::PoleAtOrigin(format!("E_n(0) with n = {n}")));
    }
    Ok(z.powc(n - 1.0) * upper_incomplete_gamma(1.0 - n, z, policy)?)
}

/// Scaled upper incomplete gamma e^z Γ(s, z).
pub fn upper_gamma_scaled(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if z == c(0.0) {
        if s.re > 0.0 {
            return gamma(s);
        }
        return Err(Error::PoleAtOrigin(format!("Γ(s, 0) with Re s = {} <= 0", s.re)));
    }
    let near_negative_axis = z.re < 0.0 && z.im.abs() < -z.re;
    let value = if z.norm() >= 2.0_f64.max(s.norm()) && !near_negative_axis {
        z.powc(s) * legendre_fraction(s, z, policy)?
    } else {
        scaled_by_series(s, z, policy)?
    };
    if !is_finite(value) {
        return Err(Error::domain(format!("Γ({s}, {z}) is not finite")));
    }
    Ok(value)
}

/// e^z E₁(z) + log z, which tends to -γ as z → 0.
pub fn e1_scaled_plus_log(z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if z == c(0.0) {
        return Ok(c(-EULER_GAMMA));
    }
    if z.norm() <= 1.0 {
        // E₁(z) = -γ - log z - Σ_{k≥1} (-z)^k/(k k!)
        let mut series = c(0.0);
        let mut pow = c(1.0);
        for k in 1..200 {
            pow *= -z / k as f64;
            let term = pow / k as f64;
            series += term;
            if term.norm() < 1e-17 * series.norm().max(1e-300) {
                break;
            }
        }
        Ok(z.exp() * (-EULER_GAMMA - series) - z.ln() * expm1(z))
    } else {
        Ok(upper_gamma_scaled(c(0.0), z, policy)? + z.ln())
    }
}

/// e^z ∂Γ(s, z)/∂s.
pub fn upper_gamma_scaled_ds(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if z == c(0.0) {
        return Ok(gamma(s)? * digamma(s)?);
    }
    if s == c(1.0) {
        return e1_scaled_plus_log(z, policy);
    }
    richardson_derivative(|t| upper_gamma_scaled(t, z, policy), s, 1, policy.fd_step)
}

/// Modified Lentz evaluation of the Legendre continued fraction
/// Γ(s, z) = e^{-z} z^s / (z + 1 - s - 1(1-s)/(z + 3 - s - ...)).
fn legendre_fraction(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let mut b = z + 1.0 - s;
    let mut cc = c(1.0 / TINY);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..policy.max_terms {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = c(TINY);
        }
        cc = b + an / cc;
        if cc.norm() < TINY {
            cc = c(TINY);
        }
        d = 1.0 / d;
        let delta = d * cc;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::non_convergence("incomplete gamma continued fraction", policy.max_terms))
}

/// e^z Γ(s, z) from the power series of the lower function.
fn scaled_by_series(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if let Some(n) = nearest_pole(s) {
        return Ok(z.exp() * near_pole(s, n, z, policy)?);
    }
    let g = gamma(s)?;
    if z.re >= 0.0 {
        Ok(z.exp() * g - z.powc(s) * rising_series(s, z, policy)?)
    } else {
        Ok(z.exp() * (g - z.powc(s) * alternating_series(s, z, None, policy)?))
    }
}

/// Index n ≥ 0 such that s lies within 1/4 of -n.
fn nearest_pole(s: C64) -> Option<usize> {
    if s.re > 0.25 || s.im.abs() > 0.25 {
        return None;
    }
    let n = (-s.re).round();
    ((s + n).norm() < 0.25).then_some(n as usize)
}

/// Γ(s, z) for s = -n + ε with the pole of Γ(s) and of the n-th series term
/// cancelled analytically.
fn near_pole(s: C64, n: usize, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let eps = s + n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let f0 = sign / super::gamma::factorial(n as u32);
    let harmonic: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    // Regular part of Γ(-n+ε): (Γ(-n+ε) - f0/ε).
    let regular = if eps == c(0.0) {
        c(f0 * (harmonic - EULER_GAMMA))
    } else {
        let mut g = log_gamma_one_plus(eps);
        for j in 1..=n {
            g -= (1.0 - eps / j as f64).ln();
        }
        f0 * expm1(g) / eps
    };
    let log_z = z.ln();
    // f0 (1 - z^ε)/ε
    let pole_pair = -f0 * log_z * expm1_over(eps * log_z);
    let rest = alternating_series(s, z, Some(n), policy)?;
    Ok(regular + pole_pair - z.powc(s) * rest)
}

/// Σ_{k≥0} z^k / (s)_{k+1}.
fn rising_series(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut small = 0;
    for k in 1..policy.max_terms {
        term *= z / (s + k as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::non_convergence("lower incomplete gamma series", policy.max_terms))
}

/// Σ_{k≥0, k≠skip} (-z)^k / (k! (s+k)).
fn alternating_series(s: C64, z: C64, skip: Option<usize>, policy: &AccuracyPolicy) -> Result<C64> {
    let mut pow = c(1.0);
    let mut sum = c(0.0);
    let mut small = 0;
    for k in 0..policy.max_terms {
        if k > 0 {
            pow *= -z / k as f64;
        }
        if Some(k) == skip {
            continue;
        }
        let term = pow / (s + k as f64);
        sum += term;
        if k > z.norm() as usize && term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::non_convergence("incomplete gamma series", policy.max_terms))
}
