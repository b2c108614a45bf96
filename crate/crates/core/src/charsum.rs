//! Mean-square character sums over restricted discriminant families.
//!
//! For squarefree `M`, the quantity of interest is
//!
//! `S(N, M, X) = sum_{1 < n <= N, (n, M) = 1, n nonsquare}
//!              (sum_{d <= X restricted} chi_d(n))^2`,
//!
//! where the inner sum runs over positive fundamental discriminants whose
//! symbol at `M` is `+1` (or `-1` for the non-square side).  Writing the
//! restriction indicator as `(chi_d(M^2) +/- chi_d(M)) / 2` splits every
//! inner sum into two unrestricted ones, giving the exact bound
//! `S <= (S1 + S2) / 2` with `S1` summing `chi_d(n M^2)` squares and `S2`
//! summing `chi_d(n M)` squares over the full discriminant list.  All
//! three sums are exact integers.

use crate::arith::{coprime, fundamental_discriminants, is_square, kronecker, moebius};
use crate::error::{Error, Result};
use crate::util::gcd_u64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Cap on `#n * #d` symbol evaluations for one cell.
const SYMBOL_BUDGET: u64 = 2_000_000_000;

/// Which symbol class the inner `d`-sum keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ResidueSide {
    /// `(d | M) = +1`.
    Square,
    /// `(d | M) = -1`.
    NonSquare,
}

/// One evaluated grid cell.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JutilaCell {
    pub n_limit: u64,
    pub modulus: u64,
    pub x: u64,
    pub side: ResidueSide,
    pub restricted_size: u64,
    pub full_size: u64,
    pub s: u64,
    pub s1: u64,
    pub s2: u64,
    /// `S / (N M^2 X ln^10(N M))`.
    pub ratio: f64,
}

/// Exact evaluation of `S`, `S1`, `S2` for one `(N, M, X)` triple.
///
/// `include_n_equal_m` restores the excluded `n = M` term, whose inner sum
/// is the full restricted count; it exists to confirm that dropping the
/// non-coprime `n` matters (the term contributes `restricted_size^2`).
pub fn jutila_cell(
    n_limit: u64,
    modulus: u64,
    x: u64,
    side: ResidueSide,
    include_n_equal_m: bool,
) -> Result<JutilaCell> {
    if modulus == 0 || moebius(modulus) == 0 {
        return Err(Error::domain(
            "jutila_cell",
            format!("modulus {modulus} must be a squarefree positive integer"),
        ));
    }
    let full = fundamental_discriminants(x, false)?;
    let restricted: Vec<u64> = full
        .iter()
        .copied()
        .filter(|&d| {
            let k = kronecker(d as i64, modulus as i64);
            match side {
                ResidueSide::Square => k == 1,
                ResidueSide::NonSquare => k == -1,
            }
        })
        .collect();
    let cost = n_limit as u128 * (restricted.len() + 2 * full.len()) as u128;
    if cost > SYMBOL_BUDGET as u128 {
        return Err(Error::Capacity {
            what: "character symbol evaluations",
            requested: cost.min(u64::MAX as u128) as u64,
            budget: SYMBOL_BUDGET,
        });
    }

    let ns: Vec<u64> = (2..=n_limit)
        .filter(|&n| coprime(n, modulus) && !is_square(n))
        .collect();
    let terms: Vec<(u64, u64, u64)> = ns
        .par_iter()
        .map(|&n| {
            let a: i64 = restricted
                .iter()
                .map(|&d| kronecker(d as i64, n as i64) as i64)
                .sum();
            let b1: i64 = full
                .iter()
                .map(|&d| kronecker(d as i64, (n * modulus * modulus) as i64) as i64)
                .sum();
            let b2: i64 = full
                .iter()
                .map(|&d| kronecker(d as i64, (n * modulus) as i64) as i64)
                .sum();
            // the indicator split is an exact identity per n
            match side {
                ResidueSide::Square => debug_assert_eq!(2 * a, b1 + b2),
                ResidueSide::NonSquare => debug_assert_eq!(2 * a, b1 - b2),
            }
            ((a * a) as u64, (b1 * b1) as u64, (b2 * b2) as u64)
        })
        .collect();
    let mut s = 0u64;
    let mut s1 = 0u64;
    let mut s2 = 0u64;
    for (ts, t1, t2) in terms {
        s += ts;
        s1 += t1;
        s2 += t2;
    }

    if include_n_equal_m && modulus > 1 && modulus <= n_limit {
        let a: i64 = restricted
            .iter()
            .map(|&d| kronecker(d as i64, modulus as i64) as i64)
            .sum();
        s += (a * a) as u64;
    }

    let nf = n_limit as f64;
    let mf = modulus as f64;
    let denom = nf * mf * mf * x as f64 * (nf * mf).ln().powi(10);
    let ratio = if denom > 0.0 { s as f64 / denom } else { 0.0 };
    Ok(JutilaCell {
        n_limit,
        modulus,
        x,
        side,
        restricted_size: restricted.len() as u64,
        full_size: full.len() as u64,
        s,
        s1,
        s2,
        ratio,
    })
}

/// Evaluate the full cartesian grid, ascending in each coordinate.
pub fn jutila_grid(
    n_values: &[u64],
    m_values: &[u64],
    x_values: &[u64],
    side: ResidueSide,
) -> Result<Vec<JutilaCell>> {
    let mut out = Vec::with_capacity(n_values.len() * m_values.len() * x_values.len());
    for &n in n_values {
        for &m in m_values {
            for &x in x_values {
                out.push(jutila_cell(n, m, x, side, false)?);
            }
        }
    }
    Ok(out)
}

/// Growth exponent of `S` in `X` at fixed `(N, M)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExponentFit {
    pub n_limit: u64,
    pub modulus: u64,
    pub side: ResidueSide,
    pub exponent: f64,
}

/// Least-squares slope of `ln S` against `ln X` within each `(N, M, side)`
/// group.  Groups with fewer than two usable cells (or any `S = 0`) are
/// skipped.
pub fn fitted_x_exponents(cells: &[JutilaCell]) -> Vec<ExponentFit> {
    let mut groups: BTreeMap<(u64, u64, ResidueSide), Vec<(f64, f64)>> = BTreeMap::new();
    for c in cells {
        if c.s > 0 {
            groups
                .entry((c.n_limit, c.modulus, c.side))
                .or_default()
                .push(((c.x as f64).ln(), (c.s as f64).ln()));
        }
    }
    let mut out = Vec::new();
    for ((n_limit, modulus, side), pts) in groups {
        if pts.len() < 2 {
            continue;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            continue;
        }
        out.push(ExponentFit {
            n_limit,
            modulus,
            side,
            exponent: sxy / sxx,
        });
    }
    out
}

/// Multiplicativity sanity: scaling `n` by `m^2` leaves `chi_d(n)`
/// unchanged whenever `gcd(d, m) = 1`.
pub fn square_multiplier_invariant(d: u64, n: u64, m: u64) -> bool {
    gcd_u64(d, m) > 1 || kronecker(d as i64, (n * m * m) as i64) == kronecker(d as i64, n as i64)
}
