//! Series evaluation and numerical verification of parametric definite
//! integrals built on a single log-power kernel.
//!
//! Every series in [`series_engine`] reduces to sums of
//!
//!   K(p; a, b) = ∫_0^b x^{p-1} (-log(a x))^k dx = a^{-p} p^{-k-1} Γ(k+1, -p log(a b)),
//!
//! which [`quadrature`] cross-checks by direct integration and
//! [`verifier`] compares against the closed forms stored in
//! [`identity_catalog`].

pub mod error;
pub mod identity_catalog;
pub mod quadrature;
pub mod series_engine;
pub mod special_functions;
pub mod summation;
mod util;
pub mod verifier;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use summation::{AccuracyPolicy, SeriesSum};
