//! Series representations of log-power integrals.
//!
//! Every family reduces to a (possibly multiple) sum of coefficient times the
//! kernel K(p; a, b) = ∫_0^b x^{p-1} (-log(a x))^k dx.

mod kernel;
mod theorems;

pub use kernel::{log_power_kernel, LogWeight, POLE_TOLERANCE};
pub use theorems::*;

pub use crate::summation::{accelerate_alternating, SeriesSum as SeriesResult};
