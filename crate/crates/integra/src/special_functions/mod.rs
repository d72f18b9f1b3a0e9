//! Complex special functions on principal branches.

pub mod bessel;
pub mod constants;
pub mod gamma;
pub mod hypergeometric;
pub mod incomplete_gamma;
pub mod lerch;
pub mod zeta;

pub use bessel::bessel_j;
pub use gamma::{beta, binomial_general, digamma, gamma, log_gamma, pochhammer, polygamma, rgamma};
pub use hypergeometric::hypergeometric_pfq;
pub use incomplete_gamma::{
    e1_scaled_plus_log, expint_e, lower_incomplete_gamma, upper_gamma_scaled, upper_gamma_scaled_ds,
    upper_incomplete_gamma,
};
pub use lerch::{lerch_hurwitz_functional_check, lerch_phi, polylog};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_regular, riemann_zeta, stieltjes_gamma1, zeta_s_derivative};

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::summation::AccuracyPolicy;
use crate::util::richardson_derivative;

/// ∂^order/∂s^order Φ(z, s, a) by Richardson-extrapolated central differences.
pub fn lerch_s_derivative(order: u32, z: C64, s: C64, a: C64, policy: &AccuracyPolicy) -> Result<C64> {
    richardson_derivative(|t| lerch_phi(z, t, a, policy), s, order, policy.fd_step)
}
