//! Hurwitz zeta function by Euler–Maclaurin summation, its parameter
//! derivatives and the first Stieltjes constant.

use num_complex::Complex64 as C64;

use super::gamma::{c, factorial, BERNOULLI_EVEN};
use crate::error::{Error, Result};
use crate::summation::AccuracyPolicy;
use crate::util::{expm1_over, richardson_derivative};

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (n+a)^{-s}, analytically continued in s.
pub fn hurwitz_zeta(s: C64, a: C64) -> Result<C64> {
    if s == c(1.0) {
        return Err(Error::PoleAtSOne);
    }
    check_shift(a)?;
    Ok(euler_maclaurin(s, a, false))
}

/// Riemann zeta ζ(s) = ζ(s, 1).
pub fn riemann_zeta(s: C64) -> Result<C64> {
    hurwitz_zeta(s, c(1.0))
}

/// ζ(k) for integer k ≥ 2.
pub(crate) fn riemann_zeta_int(k: u32) -> f64 {
    euler_maclaurin(c(k as f64), c(1.0), false).re
}

/// ζ(s, a) - 1/(s-1), which is entire in s.
pub fn hurwitz_zeta_regular(s: C64, a: C64) -> Result<C64> {
    check_shift(a)?;
    Ok(euler_maclaurin(s, a, true))
}

fn check_shift(a: C64) -> Result<()> {
    if a.re <= 0.0 {
        return Err(Error::UnsupportedDomain(format!(
            "Hurwitz zeta needs Re(a) > 0, got a = {a}"
        )));
    }
    Ok(())
}

fn euler_maclaurin(s: C64, a: C64, remove_pole: bool) -> C64 {
    let threshold = 12.0_f64.max(2.0 * s.norm());
    let mut n_shift = 0usize;
    while (a + n_shift as f64).norm() < threshold || (a.re + n_shift as f64) < threshold / 2.0 {
        n_shift += 1;
    }
    let mut acc = c(0.0);
    for n in 0..n_shift {
        acc += (-s * (a + n as f64).ln()).exp();
    }
    let x = a + n_shift as f64;
    let ln_x = x.ln();
    let x_pow = (-s * ln_x).exp();
    let u = s - 1.0;
    // ∫_N^∞ (x+a)^{-s}: X^{1-s}/(s-1), optionally minus the pole 1/(s-1).
    acc += if remove_pole {
        -ln_x * expm1_over(-u * ln_x)
    } else {
        x * x_pow / u
    };
    acc += 0.5 * x_pow;

    // Σ B_{2k}/(2k)! (s)_{2k-1} X^{-s-2k+1}
    let inv_x2 = 1.0 / (x * x);
    let mut t = s * x_pow / x;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_k = 2 * (k as u32 + 1);
        let term = *b / factorial(two_k) * t;
        acc += term;
        if term.norm() <= 1e-17 * acc.norm() {
            break;
        }
        let m = two_k as f64;
        t *= (s + m - 1.0) * (s + m) * inv_x2;
    }
    acc
}

/// ∂^order/∂s^order ζ(s, a) for order 1 or 2, by Richardson-extrapolated
/// central differences with step `policy.fd_step`.
pub fn zeta_s_derivative(order: u32, s: C64, a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    check_shift(a)?;
    richardson_derivative(|t| hurwitz_zeta(t, a), s, order, policy.fd_step)
}

/// Generalized first Stieltjes constant γ₁(a), the coefficient in
/// ζ(s, a) = 1/(s-1) + γ₀(a) - γ₁(a)(s-1) + ...
pub fn stieltjes_gamma1(a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    check_shift(a)?;
    let d = richardson_derivative(|t| hurwitz_zeta_regular(t, a), c(1.0), 1, policy.fd_step)?;
    Ok(-d)
}
