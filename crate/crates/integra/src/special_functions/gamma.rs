//! Gamma function family: Γ, 1/Γ, log Γ, polygamma, Pochhammer symbols and
//! generalized binomial coefficients.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Bernoulli numbers B_2, B_4, ..., B_30.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument is treated as sitting on a pole.
const POLE_EPS: f64 = 1e-14;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// If `z` is (numerically) a non-positive integer, return it.
pub(crate) fn nonpositive_integer(z: C64) -> Option<i64> {
    if z.im.abs() > POLE_EPS * (1.0 + z.re.abs()) || z.re > 0.5 {
        return None;
    }
    let r = z.re.round();
    ((z.re - r).abs() <= POLE_EPS * (1.0 + r.abs())).then_some(r as i64)
}

fn lanczos(z: C64) -> C64 {
    // Valid for Re z >= 1/2.
    let z = z - 1.0;
    let mut acc = c(LANCZOS[0]);
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc += coef / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Γ(z); errors at the poles z = 0, -1, -2, ...
pub fn gamma(z: C64) -> Result<C64> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::PoleAtNonpositiveInteger(n as f64));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: C64) -> C64 {
    if z.im == 0.0 && z.re >= 1.0 && z.re <= 171.0 && z.re.fract() == 0.0 {
        return c(factorial(z.re as u32 - 1));
    }
    if z.re < 0.5 {
        PI / ((PI * z).sin() * lanczos(1.0 - z))
    } else {
        lanczos(z)
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// 1/Γ(z), an entire function that vanishes at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if nonpositive_integer(z).is_some() {
        return c(0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * lanczos(1.0 - z) / PI
    } else {
        1.0 / gamma_unchecked(z)
    }
}

/// Principal branch of log Γ(z): analytic off the non-positive real axis and
/// continuous across it from above.
pub fn log_gamma(z: C64) -> Result<C64> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::PoleAtNonpositiveInteger(n as f64));
    }
    let mut shift = c(0.0);
    let mut w = z;
    while w.norm() < 15.0 || w.re < 8.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling_log_gamma(w) - shift)
}

fn stirling_log_gamma(z: C64) -> C64 {
    let mut acc = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let n = 2.0 * (k as f64 + 1.0);
        acc += *b / (n * (n - 1.0)) * pow;
        pow *= inv2;
    }
    acc
}

/// Polygamma ψ^(n)(z); n = 0 gives the digamma function.
pub fn polygamma(n: u32, z: C64) -> Result<C64> {
    if let Some(p) = nonpositive_integer(z) {
        return Err(Error::PoleAtNonpositiveInteger(p as f64));
    }
    let nf = n as f64;
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let n_fact = factorial(n);
    let mut shift = c(0.0);
    let mut w = z;
    let threshold = 15.0 + nf;
    while w.re < threshold || w.norm() < threshold {
        // ψ^(n)(w) = ψ^(n)(w+1) - (-1)^n n! / w^(n+1)
        shift += sign_n * n_fact / w.powi(n as i32 + 1);
        w += 1.0;
    }
    let inv = 1.0 / w;
    let asym = if n == 0 {
        let mut acc = w.ln() - 0.5 * inv;
        let inv2 = inv * inv;
        let mut pow = inv2;
        for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
            acc -= *b / (2.0 * (k as f64 + 1.0)) * pow;
            pow *= inv2;
        }
        acc
    } else {
        let mut acc = factorial(n - 1) * inv.powi(n as i32) + 0.5 * n_fact * inv.powi(n as i32 + 1);
        let inv2 = inv * inv;
        let mut pow = inv.powi(n as i32 + 2);
        for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
            let two_k = 2 * (k as u32 + 1);
            // (2k+n-1)! / (2k)!
            let ratio: f64 = ((two_k + 1)..=(two_k + n - 1)).map(|v| v as f64).product();
            acc += *b * ratio * pow;
            pow *= inv2;
        }
        -sign_n * acc
    };
    Ok(asym - shift)
}

/// Digamma ψ(z).
pub fn digamma(z: C64) -> Result<C64> {
    polygamma(0, z)
}

/// Rising factorial (a)_n = Γ(a+n)/Γ(a) for integer n ≥ 0.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(c(1.0), |acc, j| acc * (a + j as f64))
}

/// Generalized binomial coefficient C(a, j) = a(a-1)...(a-j+1)/j!.
pub fn binomial_general(a: C64, j: usize) -> C64 {
    (0..j).fold(c(1.0), |acc, i| acc * (a - i as f64) / (i as f64 + 1.0))
}

/// Euler's beta function B(p, q) = Γ(p)Γ(q)/Γ(p+q).
pub fn beta(p: C64, q: C64) -> Result<C64> {
    Ok(gamma(p)? * gamma(q)? * rgamma(p + q))
}

/// log Γ(1+ε) - log Γ(1) for small |ε|, via its Taylor series in ζ values.
pub(crate) fn log_gamma_one_plus(eps: C64) -> C64 {
    if eps.norm() > 0.25 {
        return log_gamma(1.0 + eps).unwrap_or(c(f64::NAN));
    }
    // log Γ(1+ε) = -γ ε + Σ_{k≥2} (-1)^k ζ(k) ε^k / k
    let mut acc = -super::constants::EULER_GAMMA * eps;
    let mut pow = eps;
    for k in 2..60 {
        pow *= eps;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * super::zeta::riemann_zeta_int(k) * pow / k as f64;
        acc += term;
        if term.norm() < 1e-18 * acc.norm().max(1e-300) {
            break;
        }
    }
    acc
}
