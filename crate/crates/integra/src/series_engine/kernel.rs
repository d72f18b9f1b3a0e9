//! The log-power kernel shared by every series.
//!
//! K(p; a, b) = ∫_0^b x^{p-1} (-log(a x))^k dx
//!            = a^{-p} p^{-k-1} Γ(k+1, -p log(a b))
//!            = b^p p^{-k-1} e^{z} Γ(k+1, z),   z = -p log(a b).
//!
//! The last form is evaluated, so the growth of Γ(k+1, z) along the negative
//! real axis (upper limit beyond 1/a) cancels against a^{-p} analytically.
//! With a log-log weight the integrand carries an extra log(-log(a x)) and the
//! kernel is the k-derivative of the above.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::special_functions::constants::EULER_GAMMA;
use crate::special_functions::{e1_scaled_plus_log, gamma, upper_gamma_scaled, upper_gamma_scaled_ds};
use crate::summation::AccuracyPolicy;

/// Logarithmic weight multiplying x^{p-1} inside the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogWeight {
    /// (-log(a x))^k
    #[default]
    Power,
    /// (-log(a x))^k log(-log(a x))
    LogLog,
}

/// Exponents closer to zero than this are treated as the pole of the kernel.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Evaluate K(p; a, b) for the given weight.
pub fn log_power_kernel(
    p: C64,
    k: C64,
    a: C64,
    b: C64,
    weight: LogWeight,
    policy: &AccuracyPolicy,
) -> Result<C64> {
    if p.norm() < POLE_TOLERANCE {
        return Err(Error::domain(format!("kernel exponent P = {p} sits on the pole P = 0")));
    }
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::domain("kernel needs a != 0 and b != 0"));
    }
    let log_b = b.ln();
    let log_ab = if b.im == 0.0 && b.re > 0.0 { a.ln() + log_b } else { (a * b).ln() };
    // Negating a real log yields -0 imaginary parts; the integrand's
    // principal branch on (1/a, b] is the upper side of the cut.
    let z = -p * log_ab;
    let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
    let b_pow = (p * log_b).exp();
    let p_pow = (-(k + 1.0) * p.ln()).exp();
    match weight {
        LogWeight::Power => {
            let g = if z.norm() == 0.0 {
                gamma(k + 1.0)?
            } else {
                upper_gamma_scaled(k + 1.0, z, policy)?
            };
            Ok(b_pow * p_pow * g)
        }
        LogWeight::LogLog => {
            let log_p = p.ln();
            if k == C64::new(0.0, 0.0) {
                let inner = if z.norm() == 0.0 {
                    C64::new(-EULER_GAMMA, 0.0)
                } else {
                    e1_scaled_plus_log(z, policy)?
                };
                Ok(b_pow / p * (inner - log_p))
            } else {
                let s = k + 1.0;
                let (g, dg) = if z.norm() == 0.0 {
                    let g = gamma(s)?;
                    (g, g * crate::special_functions::digamma(s)?)
                } else {
                    (upper_gamma_scaled(s, z, policy)?, upper_gamma_scaled_ds(s, z, policy)?)
                };
                Ok(b_pow * p_pow * (dg - log_p * g))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// Oracle: midpoint rule after x = b e^{-t}, which removes the endpoint
    /// singularity of x^{p-1} for real p > 0.
    fn kernel_oracle(p: f64, k: f64, a: f64, b: f64) -> f64 {
        let n = 400_000;
        let t_max = 60.0 / p;
        let h = t_max / n as f64;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                let x = b * (-t).exp();
                x.powf(p) * (-(a * x).ln()).powf(k)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn unit_limits_reduce_to_gamma() {
        let p = AccuracyPolicy::default();
        let v = log_power_kernel(c(2.0), c(3.0), c(1.0), c(1.0), LogWeight::Power, &p).unwrap();
        assert!((v.re - 6.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn matches_quadrature_oracle_below_unit_upper_limit() {
        let p = AccuracyPolicy::default();
        for &(pp, k, a, b) in &[(1.5, 2.0, 1.3, 0.6), (0.7, 0.5, 0.4, 1.0), (3.0, 1.0, 2.0, 0.5)] {
            let v = log_power_kernel(c(pp), c(k), c(a), c(b), LogWeight::Power, &p).unwrap();
            let o = kernel_oracle(pp, k, a, b);
            assert!((v.re - o).abs() < 1e-8 * o.abs().max(1.0), "{pp},{k},{a},{b}: {v} vs {o}");
        }
    }

    #[test]
    fn integer_k_beyond_sign_change_is_real() {
        // With ab > 1 the log changes sign inside the interval; for integer k the
        // integral stays real: ∫_0^2 x (-log x) dx = 1 - 2 log 2.
        let p = AccuracyPolicy::default();
        let v = log_power_kernel(c(2.0), c(1.0), c(1.0), c(2.0), LogWeight::Power, &p).unwrap();
        let exact = 1.0 - 2.0 * 2f64.ln();
        assert!((v - c(exact)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn loglog_weight_at_unit_limits() {
        // ∫_0^1 x^{p-1} log(-log x) dx = -(γ + log p)/p
        let p = AccuracyPolicy::default();
        for &pp in &[0.5, 1.0, 3.0] {
            let v = log_power_kernel(c(pp), c(0.0), c(1.0), c(1.0), LogWeight::LogLog, &p).unwrap();
            let exact = -(EULER_GAMMA + pp.ln()) / pp;
            assert!((v.re - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn loglog_weight_matches_k_derivative() {
        let p = AccuracyPolicy::default();
        let (pp, k, a, b) = (c(1.7), c(0.8), c(1.2), c(0.7));
        let h = 1e-4;
        let plus = log_power_kernel(pp, k + h, a, b, LogWeight::Power, &p).unwrap();
        let minus = log_power_kernel(pp, k - h, a, b, LogWeight::Power, &p).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let v = log_power_kernel(pp, k, a, b, LogWeight::LogLog, &p).unwrap();
        assert!((v - fd).norm() < 1e-7, "{v} vs {fd}");
        let v0 = log_power_kernel(pp, c(0.0), a, b, LogWeight::LogLog, &p).unwrap();
        let plus0 = log_power_kernel(pp, c(h), a, b, LogWeight::Power, &p).unwrap();
        let minus0 = log_power_kernel(pp, c(-h), a, b, LogWeight::Power, &p).unwrap();
        assert!((v0 - (plus0 - minus0) / (2.0 * h)).norm() < 1e-7);
    }

    #[test]
    fn pole_is_a_domain_violation() {
        let p = AccuracyPolicy::default();
        let r = log_power_kernel(c(0.0), c(1.0), c(1.0), c(1.0), LogWeight::Power, &p);
        assert!(matches!(r, Err(Error::DomainViolation(_))));
    }
}
