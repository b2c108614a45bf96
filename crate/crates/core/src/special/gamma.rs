//! Digamma and log-gamma in the right half-plane, by upward recurrence into
//! the Stirling regime.

use super::BERNOULLI;
use crate::error::{Error, Result};
use num_complex::Complex64;

const STIRLING_RADIUS: f64 = 12.0;
const STIRLING_TERMS: usize = 9;

fn require_right_half(z: Complex64, op: &'static str) -> Result<()> {
    if !(z.re > 0.0) {
        return Err(Error::domain(
            op,
            format!("Re z = {} must be positive", z.re),
        ));
    }
    Ok(())
}

/// `psi(z)` for `Re z > 0`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    require_right_half(z, "digamma")?;
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < STIRLING_RADIUS {
        shift -= 1.0 / z;
        z += 1.0;
    }
    // psi(z) ~ ln z - 1/(2z) - sum B_{2k} / (2k z^{2k})
    let inv2 = 1.0 / (z * z);
    let mut asym = z.ln() - 1.0 / (2.0 * z);
    let mut pow = inv2;
    for (k, &b) in BERNOULLI.iter().enumerate().take(STIRLING_TERMS) {
        asym -= b / (2.0 * (k as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    Ok(asym + shift)
}

/// `ln Gamma(z)` for `Re z > 0`, continuous in the upper and lower
/// half-planes (not reduced modulo `2 pi` in the imaginary part).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    require_right_half(z, "log_gamma")?;
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < STIRLING_RADIUS {
        shift -= z.ln();
        z += 1.0;
    }
    const HALF_LN_TWO_PI: f64 = 0.9189385332046727;
    let mut asym = (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI;
    // + sum B_{2k} / (2k (2k-1) z^{2k-1})
    let inv2 = 1.0 / (z * z);
    let mut pow = 1.0 / z;
    for (k, &b) in BERNOULLI.iter().enumerate().take(STIRLING_TERMS) {
        let two_k = 2.0 * (k as f64 + 1.0);
        asym += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    Ok(asym + shift)
}

/// `Gamma(1 - iy) / Gamma(1 + iy)` for real `y`; a unit-modulus number,
/// computed as `exp(-2i Im ln Gamma(1 + i|y|))` and conjugated for `y < 0`.
pub fn gamma_ratio_reflection(y: f64) -> Result<Complex64> {
    if y == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let lg = log_gamma(Complex64::new(1.0, y.abs()))?;
    let ratio = Complex64::new(0.0, -2.0 * lg.im).exp();
    Ok(if y > 0.0 { ratio } else { ratio.conj() })
}
