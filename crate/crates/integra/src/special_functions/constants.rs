//! Mathematical constants used by closed forms.

pub use std::f64::consts::{LN_2, PI};

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Catalan's constant G = Σ (-1)^n / (2n+1)^2.
pub const CATALAN: f64 = 0.915_965_594_177_219;

/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Glaisher–Kinkelin constant A.
pub const GLAISHER: f64 = 1.282_427_129_100_622_6;
