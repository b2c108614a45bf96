//! Symmetric-square data attached to the curve.
//!
//! The local factor at a good prime `p`, with `s2 = lambda_p^2 - 2` the
//! square power sum of the Satake parameters, is
//! `[(1 - x)(1 - s2 x + x^2)]^{-1}` at `x = p^{-s}`; at the conductor it is
//! `(1 - M^{-(s+1)})^{-1}`.  The logarithmic derivative, Euler products,
//! and the finite geometric series that mediates between the zeta and
//! symmetric-square conductor contributions are all provided in matched
//! truncations so that identity checks cancel at machine precision.

use crate::arith::checked_pow;
use crate::curve::{power_sum, HeckeTable};
use crate::error::{Error, Result};
use crate::util::{Kahan, KahanC};
use num_complex::Complex64;

/// `sum_{l >= 1} (M^l - 1) ln M * M^{-z l}`, the mediating series.
/// Requires `Re z > 1.25`; converges geometrically.
pub fn conductor_series(m: u64, z: Complex64) -> Result<Complex64> {
    if !(z.re > 1.25) {
        return Err(Error::domain(
            "conductor_series",
            format!("Re z = {} too small for convergence", z.re),
        ));
    }
    let ln_m = (m as f64).ln();
    let mut acc = KahanC::new();
    for l in 1..=2000u32 {
        let lf = l as f64;
        let big = ((lf - z * lf) * ln_m).exp(); // M^{(1-z) l}
        let small = (-z * lf * ln_m).exp(); // M^{-z l}
        let term = (big - small) * ln_m;
        acc.add(term);
        if term.norm() < 1e-22 * (1.0 + acc.value().norm()) {
            break;
        }
    }
    Ok(acc.value())
}

/// Real-argument form of [`conductor_series`].
pub fn conductor_series_real(m: u64, z: f64) -> Result<f64> {
    Ok(conductor_series(m, Complex64::new(z, 0.0))?.re)
}

/// [`conductor_series`] truncated to the shared prime power grid:
/// `l <= k_max` and `M^l <= pow_cap`.
pub fn conductor_series_grid(m: u64, z: f64, k_max: u32, pow_cap: u64) -> f64 {
    let ln_m = (m as f64).ln();
    let mut acc = Kahan::new();
    for l in 1..=k_max {
        if checked_pow(m, l, pow_cap).is_none() {
            break;
        }
        let lf = l as f64;
        let term = (((1.0 - z) * lf * ln_m).exp() - (-z * lf * ln_m).exp()) * ln_m;
        acc.add(term);
    }
    acc.value()
}

/// Truncated `zeta'/zeta(s) = -sum ln p * p^{-l s}` over `p <= p_max`,
/// `l <= k_max`, `p^l <= pow_cap`.  Every prime in the table's range is
/// included (the conductor too; zeta knows nothing about the curve).
pub fn zeta_log_deriv_grid(
    table: &HeckeTable,
    s: f64,
    p_max: u64,
    k_max: u32,
    pow_cap: u64,
) -> Result<f64> {
    table.require(p_max)?;
    let mut acc = Kahan::new();
    for &p in table.primes.iter().take_while(|&&p| p <= p_max) {
        let ln_p = (p as f64).ln();
        for l in 1..=k_max {
            if checked_pow(p, l, pow_cap).is_none() {
                break;
            }
            acc.add(-ln_p * (-s * l as f64 * ln_p).exp());
        }
    }
    Ok(acc.value())
}

/// Truncated symmetric-square `L'/L(s)` on the same grid:
/// `-sum_{p != M} (q_{2l} + 1) ln p * p^{-l s}  -  ln M sum_l M^{-l(s+1)}`
/// with `q_{2l}` the square power sums of the Satake parameters.
pub fn sym2_log_deriv_grid(
    table: &HeckeTable,
    s: f64,
    p_max: u64,
    k_max: u32,
    pow_cap: u64,
) -> Result<f64> {
    table.require(p_max)?;
    let m = table.curve.conductor;
    let ln_m = (m as f64).ln();
    let mut acc = Kahan::new();
    for (i, &p) in table.primes.iter().enumerate() {
        if p > p_max {
            break;
        }
        if p == m {
            continue;
        }
        let ln_p = (p as f64).ln();
        let lambda = table.lambda[i];
        for l in 1..=k_max {
            if checked_pow(p, l, pow_cap).is_none() {
                break;
            }
            let q2l = power_sum(lambda, 2 * l);
            acc.add(-(q2l + 1.0) * ln_p * (-s * l as f64 * ln_p).exp());
        }
    }
    // bad factor, same l-range as the other grid sums at p = M
    for l in 1..=k_max {
        if checked_pow(m, l, pow_cap).is_none() {
            break;
        }
        acc.add(-ln_m * (-(s + 1.0) * l as f64 * ln_m).exp());
    }
    Ok(acc.value())
}

/// Symmetric-square `L'/L(s)` for complex `s`, good part truncated by
/// frequency: only prime powers with `l ln p <= freq_cut` enter.  The bad
/// part is summed to convergence.
pub fn sym2_log_deriv_freq(
    table: &HeckeTable,
    s: Complex64,
    freq_cut: f64,
) -> Result<Complex64> {
    let p_cap = freq_cut.exp().floor() as u64;
    table.require(p_cap)?;
    let m = table.curve.conductor;
    let mut acc = KahanC::new();
    for (i, &p) in table.primes.iter().enumerate() {
        if p == m {
            continue;
        }
        let ln_p = (p as f64).ln();
        if ln_p > freq_cut {
            break;
        }
        let lambda = table.lambda[i];
        let mut l = 1u32;
        while l as f64 * ln_p <= freq_cut {
            let q2l = power_sum(lambda, 2 * l);
            acc.add(-(q2l + 1.0) * ln_p * (-s * (l as f64) * ln_p).exp());
            l += 1;
        }
    }
    let ln_m = (m as f64).ln();
    for l in 1..=300u32 {
        let term = -ln_m * (-(s + 1.0) * (l as f64) * ln_m).exp();
        acc.add(term);
        if term.norm() < 1e-22 {
            break;
        }
    }
    Ok(acc.value())
}

/// Partial Euler product for `L(sym^2, s)` over `p <= p_max`, times the bad
/// factor.  The truncation error is `O(1/p_max)`-conditional near `s = 1`,
/// so this is only used where a common factor cancels or a percent-level
/// wobble is tolerable.
pub fn sym2_value_truncated(
    table: &HeckeTable,
    s: Complex64,
    p_max: u64,
) -> Result<Complex64> {
    table.require(p_max)?;
    let m = table.curve.conductor;
    let ln_m = (m as f64).ln();
    let mut log_acc = KahanC::new();
    for (i, &p) in table.primes.iter().enumerate() {
        if p > p_max {
            break;
        }
        if p == m {
            continue;
        }
        let s2 = table.lambda[i] * table.lambda[i] - 2.0;
        let x = (-s * (p as f64).ln()).exp();
        let local = (1.0 - x) * (1.0 - s2 * x + x * x);
        log_acc.add(-local.ln());
    }
    log_acc.add(-(1.0 - (-(s + 1.0) * ln_m).exp()).ln());
    Ok(log_acc.value().exp())
}

/// `L(sym^2, 1 - 2r) / L(sym^2, 1)` with numerator and denominator cut at
/// the same `p_max`, so the ratio is exactly 1 at `r = 0` and the shared
/// tail cancels.
pub fn sym2_ratio_at_one(table: &HeckeTable, r: Complex64, p_max: u64) -> Result<Complex64> {
    table.require(p_max)?;
    let m = table.curve.conductor;
    let mut log_acc = KahanC::new();
    let s = 1.0 - 2.0 * r;
    for (i, &p) in table.primes.iter().enumerate() {
        if p > p_max {
            break;
        }
        if p == m {
            continue;
        }
        let s2 = table.lambda[i] * table.lambda[i] - 2.0;
        let ln_p = (p as f64).ln();
        let x = (-s * ln_p).exp();
        let x0 = Complex64::new((-ln_p).exp(), 0.0);
        let num = (1.0 - x0) * (1.0 - s2 * x0 + x0 * x0);
        let den = (1.0 - x) * (1.0 - s2 * x + x * x);
        log_acc.add((num / den).ln());
    }
    let ln_m = (m as f64).ln();
    let bad_num = 1.0 - Complex64::new((-2.0 * ln_m).exp(), 0.0);
    let bad_den = 1.0 - (-(2.0 - 2.0 * r) * ln_m).exp();
    log_acc.add((bad_num / bad_den).ln());
    Ok(log_acc.value().exp())
}

/// `sum Lambda_2(n) n^{-s}` over the grid, where `Lambda_2(p^l) =
/// (alpha^{2l} + beta^{2l}) ln p` at good primes.  The grid members are
/// enumerated as integers, sorted, and each is factored independently
/// before its coefficient is looked up, so this side of the identity does
/// not share indexing code with the Euler product side.
pub fn dirichlet_coefficient_sum(
    table: &HeckeTable,
    s: f64,
    p_max: u64,
    k_max: u32,
    pow_cap: u64,
) -> Result<f64> {
    table.require(p_max)?;
    let m = table.curve.conductor;
    let mut grid: Vec<u64> = Vec::new();
    for &p in table.primes.iter().take_while(|&&p| p <= p_max) {
        if p == m {
            continue;
        }
        for l in 1..=k_max {
            match checked_pow(p, l, pow_cap) {
                Some(n) => grid.push(n),
                None => break,
            }
        }
    }
    grid.sort_unstable();

    let mut acc = Kahan::new();
    for n in grid {
        let (p, l) = crate::arith::prime_power_decompose(n, &table.primes).ok_or_else(|| {
            Error::domain(
                "dirichlet_coefficient_sum",
                format!("grid member {n} did not factor as a covered prime power"),
            )
        })?;
        let i = table
            .primes
            .binary_search(&p)
            .map_err(|_| Error::Coverage {
                needed: p,
                available: table.limit(),
            })?;
        let coeff = power_sum(table.lambda[i], 2 * l) * (p as f64).ln();
        acc.add(coeff * (n as f64).powf(-s));
    }
    Ok(acc.value())
}
