//! Generalized hypergeometric series pFq.

use num_complex::Complex64 as C64;

use super::gamma::{c, gamma, nonpositive_integer, rgamma};
use crate::error::{Error, Result};
use crate::summation::{sum_series, AccuracyPolicy};

/// pFq(upper; lower; z) = Σ_n Π(a_i)_n / Π(b_j)_n z^n / n!.
///
/// Entire for p ≤ q. For p = q + 1 the series needs |z| ≤ 1; at z = 1 the
/// 2F1 case uses Gauss's summation theorem, and the rest of the unit circle is
/// summed with convergence acceleration.
pub fn hypergeometric_pfq(upper: &[C64], lower: &[C64], z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    for &b in lower {
        if let Some(n) = nonpositive_integer(b) {
            let terminates_first = upper
                .iter()
                .filter_map(|&a| nonpositive_integer(a))
                .any(|m| m > n);
            if !terminates_first {
                return Err(Error::LowerParameterPole(n as f64));
            }
        }
    }
    let p = upper.len();
    let q = lower.len();
    let terminating = upper.iter().any(|&a| nonpositive_integer(a).is_some());
    if p > q + 1 && !terminating && z != c(0.0) {
        return Err(Error::domain(format!("{p}F{q} diverges for z != 0")));
    }
    if p == q + 1 && !terminating && z.norm() > 1.0 + 1e-12 {
        return Err(Error::DomainOutsideUnitDisk(z.norm()));
    }
    if p == 2 && q == 1 && z == c(1.0) && !terminating {
        let (a, b, cc) = (upper[0], upper[1], lower[0]);
        let excess = cc - a - b;
        if excess.re <= 0.0 {
            return Err(Error::domain("2F1 at z = 1 needs Re(c - a - b) > 0"));
        }
        return Ok(gamma(cc)? * gamma(excess)? * rgamma(cc - a) * rgamma(cc - b));
    }

    let mut term = c(1.0);
    let series = sum_series(
        |n| {
            if n > 0 {
                let m = (n - 1) as f64;
                let num: C64 = upper.iter().map(|&a| a + m).product();
                let den: C64 = lower.iter().map(|&b| b + m).product();
                term *= num / den * z / n as f64;
            }
            Ok((term, 1))
        },
        policy,
        "hypergeometric series",
    )?;
    Ok(series.value)
}
