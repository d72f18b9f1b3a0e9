//! Bessel function of the first kind by its power series.

use num_complex::Complex64 as C64;

use super::gamma::{c, nonpositive_integer, rgamma};
use crate::error::{Error, Result};
use crate::summation::AccuracyPolicy;

/// J_v(z) = Σ_l (-1)^l (z/2)^{2l+v} / (l! Γ(l+v+1)).
///
/// The power series loses roughly |z|/2.3 digits to cancellation, which is
/// acceptable for the moderate arguments met in integrands.
pub fn bessel_j(v: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if let Some(n) = nonpositive_integer(v) {
        if n < 0 {
            // J_{-n} = (-1)^n J_n
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(sign * bessel_j(c(-n as f64), z, policy)?);
        }
    }
    if z == c(0.0) {
        return if v == c(0.0) {
            Ok(c(1.0))
        } else if v.re > 0.0 {
            Ok(c(0.0))
        } else {
            Err(Error::domain(format!("J_{v}(0) is singular")))
        };
    }
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = half.powc(v) * rgamma(v + 1.0);
    let mut sum = term;
    let mut small = 0;
    for l in 1..policy.max_terms {
        let lf = l as f64;
        term *= q / (lf * (lf + v));
        sum += term;
        if lf > half.norm() && term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::non_convergence("Bessel J series", policy.max_terms))
}
