//! Lerch transcendent Φ(z, s, a) and the polylogarithm on the closed unit disk.
//!
//! Small |z| is summed directly. Otherwise the first N terms are summed
//! directly and the remainder z^N Φ(z, s, a+N) is taken from the large-shift
//! expansion
//!
//!   Φ(z, s, X) ~ Σ_k c_k(z) (s)_k X^{-s-k},   1/(1 - z e^{-t}) = Σ_k c_k(z) t^k,
//!
//! whose terms decay like k!/(|log z| X)^k. Choosing |log z|·X ≥ 40 keeps the
//! smallest term below double precision. The expansion holds for every s, so
//! the unit circle is covered even where the defining series diverges.
//!
//! Close to z = 1 the expansion needs a shift of order 1/|log z|, so there the
//! tail is taken from Euler-Maclaurin summation of f(x) = z^x (x+a)^{-s}, whose
//! integral is an incomplete gamma function.

use num_complex::Complex64 as C64;

use super::gamma::{c, factorial, gamma, nonpositive_integer, BERNOULLI_EVEN};
use super::incomplete_gamma::upper_incomplete_gamma;
use super::zeta::hurwitz_zeta;
use crate::error::{Error, Result};
use crate::summation::AccuracyPolicy;

/// Φ(z, s, a) = Σ_{n≥0} z^n (n+a)^{-s} for |z| ≤ 1.
pub fn lerch_phi(z: C64, s: C64, a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let r = z.norm();
    if r > 1.0 + 1e-12 {
        return Err(Error::DomainOutsideUnitDisk(r));
    }
    if let Some(n) = nonpositive_integer(a) {
        return Err(Error::PoleAtNonpositiveInteger(n as f64));
    }
    if z == c(0.0) {
        return Ok(a.powc(-s));
    }
    if z == c(1.0) {
        return hurwitz_zeta(s, a);
    }
    if r <= 0.5 {
        return direct(z, s, a, policy);
    }

    let log_z = z.ln();
    let rho = log_z.norm();
    if rho < NEAR_ONE {
        return euler_maclaurin(z, log_z, s, a, policy);
    }
    let target = (40.0 / rho).max(s.norm() + 10.0).max(10.0);
    let shift = (target - a.re).ceil().max(0.0);
    if shift > policy.max_terms as f64 {
        return Err(Error::non_convergence(
            format!("Lerch Φ near z = 1 (z = {z})"),
            policy.max_terms,
        ));
    }
    let n_shift = shift as usize;
    let mut head = c(0.0);
    let mut zn = c(1.0);
    for n in 0..n_shift {
        head += zn * (a + n as f64).powc(-s);
        zn *= z;
    }
    Ok(head + zn * large_shift(z, s, a + n_shift as f64))
}

fn direct(z: C64, s: C64, a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let mut sum = c(0.0);
    let mut zn = c(1.0);
    let mut small = 0;
    for n in 0..policy.max_terms {
        let term = zn * (a + n as f64).powc(-s);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        zn *= z;
    }
    Err(Error::non_convergence("Lerch Φ direct series", policy.max_terms))
}

/// |log z| below which the Euler-Maclaurin tail replaces the large-shift one.
const NEAR_ONE: f64 = 0.5;

fn euler_maclaurin(z: C64, log_z: C64, s: C64, a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    let threshold = 12.0_f64.max(2.0 * s.norm());
    let mut n_shift = 0usize;
    while (a + n_shift as f64).norm() < threshold || (a.re + n_shift as f64) < threshold / 2.0 {
        n_shift += 1;
    }
    let mut acc = c(0.0);
    let mut zn = c(1.0);
    for n in 0..n_shift {
        acc += zn * (-s * (a + n as f64).ln()).exp();
        zn *= z;
    }
    let x = a + n_shift as f64;
    let f0 = zn * (-s * x.ln()).exp();

    // ∫_N^∞ z^t (t+a)^{-s} dt = z^{-a} (-log z)^{s-1} Γ(1-s, -(N+a) log z)
    let w = -x * log_z;
    let integral = (-a * log_z).exp() * (-log_z).powc(s - 1.0) * upper_incomplete_gamma(1.0 - s, w, policy)?;
    acc += integral + 0.5 * f0;

    // Derivatives of f = e^h with h(t) = t log z - s log(t+a), from
    // f^{(m+1)} = Σ_j C(m, j) h^{(j+1)} f^{(m-j)}.
    let max_order = 2 * BERNOULLI_EVEN.len();
    let mut dh = Vec::with_capacity(max_order);
    dh.push(log_z - s / x);
    let mut inv_pow = 1.0 / x;
    for j in 1..max_order {
        inv_pow /= x;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        dh.push(s * sign * factorial(j as u32) * inv_pow);
    }
    let mut derivs = vec![f0];
    for m in 0..max_order - 1 {
        let mut next = c(0.0);
        let mut binom = 1.0;
        for j in 0..=m {
            next += binom * dh[j] * derivs[m - j];
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
        derivs.push(next);
    }
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_k = 2 * (k as u32 + 1);
        let term = *b / factorial(two_k) * derivs[two_k as usize - 1];
        acc -= term;
        if term.norm() <= 1e-17 * acc.norm() {
            break;
        }
    }
    Ok(acc)
}

fn large_shift(z: C64, s: C64, x: C64) -> C64 {
    const MAX_ORDER: usize = 80;
    let ratio = z / (1.0 - z);
    let mut coeffs: Vec<C64> = Vec::with_capacity(MAX_ORDER);
    coeffs.push(1.0 / (1.0 - z));
    let inv_fact: Vec<f64> = (0..=MAX_ORDER).map(|i| 1.0 / factorial(i as u32)).collect();

    let x_pow = x.powc(-s);
    let mut poch_over_pow = c(1.0); // (s)_k / X^k
    let mut sum = coeffs[0] * x_pow;
    let mut smallest = f64::INFINITY;
    let mut previous = sum.norm();
    let mut quiet = 0;
    for k in 1..MAX_ORDER {
        let mut acc = c(0.0);
        for i in 1..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * inv_fact[i] * coeffs[k - i];
        }
        coeffs.push(ratio * acc);
        poch_over_pow *= (s + (k - 1) as f64) / x;
        let term = coeffs[k] * poch_over_pow * x_pow;
        let size = term.norm();
        // Asymptotic series: stop once the terms start to grow again. The
        // envelope pairs neighbours because z = -1 zeroes every even coefficient.
        let envelope = size.max(previous);
        previous = size;
        if envelope > 4.0 * smallest {
            break;
        }
        smallest = smallest.min(envelope);
        sum += term;
        if size <= 1e-18 * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    sum
}

/// Polylogarithm Li_s(z) = z Φ(z, s, 1) for |z| ≤ 1.
pub fn polylog(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<C64> {
    if z == c(1.0) {
        return hurwitz_zeta(s, c(1.0));
    }
    Ok(z * lerch_phi(z, s, c(1.0), policy)?)
}

/// Residual of the polylogarithm inversion formula on the unit circle,
///
///   |(2πi)^{-s} Γ(s) (e^{iπs} Li_s(1/z) + Li_s(z)) - ζ(1-s, (π - i log(-z))/(2π))|.
pub fn lerch_hurwitz_functional_check(s: C64, z: C64, policy: &AccuracyPolicy) -> Result<f64> {
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let sign_s = (C64::new(0.0, std::f64::consts::PI) * s).exp();
    let lhs = two_pi_i.powc(-s)
        * gamma(s)?
        * (sign_s * polylog(s, 1.0 / z, policy)? + polylog(s, z, policy)?);
    let shift = (std::f64::consts::PI - C64::new(0.0, 1.0) * (-z).ln()) / (2.0 * std::f64::consts::PI);
    let rhs = hurwitz_zeta(1.0 - s, shift)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn p() -> AccuracyPolicy {
        AccuracyPolicy::default()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn dilog_of_minus_one() {
        let v = polylog(c(2.0), c(-1.0), &p()).unwrap();
        assert!(close(v, c(-PI * PI / 12.0), 1e-13), "{v}");
    }

    #[test]
    fn alternating_lerch_is_log_two() {
        let v = lerch_phi(c(-1.0), c(1.0), c(1.0), &p()).unwrap();
        assert!(close(v, c(LN_2), 1e-13));
    }

    #[test]
    fn lerch_at_one_is_hurwitz() {
        let v = lerch_phi(c(1.0), c(3.0), c(0.5), &p()).unwrap();
        assert!(close(v, hurwitz_zeta(c(3.0), c(0.5)).unwrap(), 1e-15));
    }

    #[test]
    fn near_one_matches_direct_summation() {
        for &(z, sv, a) in &[(0.8, 2.5, 0.7), (0.95, -1.5, 1.3), (0.7, 1.0, 2.0)] {
            let v = lerch_phi(c(z), c(sv), c(a), &p()).unwrap();
            let direct: f64 = (0..2000).map(|n| z.powi(n) * (n as f64 + a).powf(-sv)).sum();
            assert!(close(v, c(direct), 1e-13), "z={z}: {v} vs {direct}");
        }
        let z = C64::from_polar(1.0, 0.3);
        let (sv, a) = (C64::new(1.5, 0.5), c(0.6));
        let lhs = lerch_phi(z, sv, a, &p()).unwrap();
        let rhs = a.powc(-sv) + z * lerch_phi(z, sv, a + 1.0, &p()).unwrap();
        assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn approaches_hurwitz_zeta_at_one() {
        let z = c(1.0 - 1e-13);
        let v = lerch_phi(z, c(2.0), c(1.5), &p()).unwrap();
        let h = hurwitz_zeta(c(2.0), c(1.5)).unwrap();
        assert!(close(v, h, 1e-11), "{v} vs {h}");
    }

    #[test]
    fn outside_unit_disk_is_rejected() {
        assert!(matches!(
            lerch_phi(c(1.5), c(2.0), c(1.0), &p()),
            Err(Error::DomainOutsideUnitDisk(_))
        ));
    }

    #[test]
    fn geometric_case_s_zero() {
        // Φ(z, 0, a) = 1/(1-z) for every a.
        for &z in &[C64::new(0.3, 0.2), C64::new(0.0, 1.0), C64::new(-0.95, 0.0)] {
            let v = lerch_phi(z, c(0.0), C64::new(2.5, 0.5), &p()).unwrap();
            assert!(close(v, 1.0 / (1.0 - z), 1e-13), "z={z}: {v}");
        }
    }

    #[test]
    fn shift_relation() {
        // Φ(z, s, a) = a^{-s} + z Φ(z, s, a+1)
        let z = C64::new(0.6, 0.7);
        let s = C64::new(1.3, -0.4);
        let a = C64::new(0.8, 0.1);
        let lhs = lerch_phi(z, s, a, &p()).unwrap();
        let rhs = a.powc(-s) + z * lerch_phi(z, s, a + 1.0, &p()).unwrap();
        assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn imaginary_unit_splits_into_hurwitz_values() {
        // Φ(i, s, u) = 4^{-s} Σ_j i^j ζ(s, (u+j)/4)
        let s = C64::new(0.3, 0.0);
        let u = C64::new(3.0, 0.5);
        let mut rhs = c(0.0);
        let mut ij = c(1.0);
        for j in 0..4 {
            rhs += ij * hurwitz_zeta(s, (u + j as f64) / 4.0).unwrap();
            ij *= C64::new(0.0, 1.0);
        }
        rhs *= c(4.0).powc(-s);
        let lhs = lerch_phi(C64::new(0.0, 1.0), s, u, &p()).unwrap();
        assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn inversion_formula_holds_on_circle() {
        for &(s, theta) in &[(0.5, 1.0), (2.0, 2.5), (3.3, -0.7)] {
            let z = C64::from_polar(1.0, theta);
            let r = lerch_hurwitz_functional_check(c(s), z, &p()).unwrap();
            assert!(r < 1e-10, "s={s} θ={theta}: {r}");
        }
    }
}
