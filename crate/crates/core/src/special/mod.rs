//! Analytic special functions: Riemann zeta with its derivative, digamma,
//! log-gamma, and the symmetric-square L-function data attached to the
//! curve.
//!
//! All routines are double precision, validated against a multiprecision
//! reference, and regularized so that quantities needed near the pole at
//! `s = 1` are computed without cancellation.

mod gamma;
mod sym2;
mod zeta;

pub use gamma::{digamma, gamma_ratio_reflection, log_gamma};
pub use sym2::{
    conductor_series, conductor_series_grid, conductor_series_real, dirichlet_coefficient_sum,
    sym2_log_deriv_freq, sym2_log_deriv_grid, sym2_ratio_at_one, sym2_value_truncated,
    zeta_log_deriv_grid,
};
pub use zeta::{zeta_log_deriv, zeta_log_deriv_regular, zeta_minus_pole, zeta_with_deriv};

use num_complex::Complex64;

/// Bernoulli numbers `B_2 .. B_28` as exact rationals in double precision.
pub(crate) const BERNOULLI: [f64; 14] = [
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
];

/// `exp(z) - 1` without cancellation for small `z`.
pub fn expm1c(z: Complex64) -> Complex64 {
    let em = z.re.exp_m1();
    let (sin_y, cos_y) = z.im.sin_cos();
    let half = (z.im / 2.0).sin();
    Complex64::new(em * cos_y - 2.0 * half * half, (em + 1.0) * sin_y)
}
