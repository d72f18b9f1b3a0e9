//! Small complex helpers missing from `num-complex`.

use num_complex::Complex64 as C64;

/// e^z - 1 without cancellation for small |z|.
pub(crate) fn expm1(z: C64) -> C64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    let half = 0.5 * z.im;
    let s = half.sin();
    // e^{a+ib} - 1 = expm1(a) cos b + (cos b - 1) + i e^a sin b
    C64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * s * s,
        z.re.exp() * z.im.sin(),
    )
}

/// (e^z - 1)/z, continuous at z = 0.
pub(crate) fn expm1_over(z: C64) -> C64 {
    if z.norm() < 1e-8 {
        return 1.0 + 0.5 * z;
    }
    expm1(z) / z
}

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Central-difference derivative of order 1 or 2 with two Richardson levels.
pub(crate) fn richardson_derivative<F>(f: F, x0: C64, order: u32, h: f64) -> crate::Result<C64>
where
    F: Fn(C64) -> crate::Result<C64>,
{
    let f0 = if order == 2 { f(x0)? } else { C64::new(0.0, 0.0) };
    let diff = |h: f64| -> crate::Result<C64> {
        let plus = f(x0 + h)?;
        let minus = f(x0 - h)?;
        Ok(match order {
            1 => (plus - minus) / (2.0 * h),
            _ => (plus - 2.0 * f0 + minus) / (h * h),
        })
    };
    if order == 0 || order > 2 {
        return Err(crate::Error::UnsupportedDomain(format!(
            "derivative order {order} (only 1 and 2 are available)"
        )));
    }
    let d0 = diff(h)?;
    let d1 = diff(h / 2.0)?;
    let d2 = diff(h / 4.0)?;
    let r1a = (4.0 * d1 - d0) / 3.0;
    let r1b = (4.0 * d2 - d1) / 3.0;
    Ok((16.0 * r1b - r1a) / 15.0)
}
