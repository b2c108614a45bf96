//! Integer substrate: sieves, the Kronecker symbol, fundamental
//! discriminants, and the quadratic twist family with its character
//! statistics.

use crate::error::{Error, Result};
use crate::util::gcd_u64;
use rayon::prelude::*;
use serde::Serialize;

/// Hard ceiling for sieve allocations, in entries.
const SIEVE_BUDGET: u64 = 200_000_000;

/// Primes up to and including `limit`, by Eratosthenes.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    if limit > SIEVE_BUDGET {
        return Err(Error::Capacity {
            what: "prime sieve",
            requested: limit,
            budget: SIEVE_BUDGET,
        });
    }
    let n = limit as usize;
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut composite = vec![false; n + 1];
    let mut p = 2usize;
    while p * p <= n {
        if !composite[p] {
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
        p += 1;
    }
    Ok((2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect())
}

/// `v[n] == true` iff `n` is squarefree, for `n <= limit`.
pub fn squarefree_sieve(limit: u64) -> Result<Vec<bool>> {
    if limit > SIEVE_BUDGET {
        return Err(Error::Capacity {
            what: "squarefree sieve",
            requested: limit,
            budget: SIEVE_BUDGET,
        });
    }
    let n = limit as usize;
    let mut sf = vec![true; n + 1];
    if n >= 1 {
        sf[0] = false;
    }
    let mut d = 2usize;
    while d * d <= n {
        let step = d * d;
        let mut q = step;
        while q <= n {
            sf[q] = false;
            q += step;
        }
        d += 1;
    }
    Ok(sf)
}

/// Moebius function by trial division.  Intended for small arguments
/// (conductors, grid moduli); cost is `O(sqrt n)`.
pub fn moebius(n: u64) -> i8 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut factors = 0u32;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            factors += 1;
        }
        d += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(a | n)`, fully general in both arguments.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        while n % 2 == 0 {
            n /= 2;
            // (a | 2) = -1 exactly for a = ±3 mod 8
            match a.rem_euclid(8) {
                3 | 5 => sign = -sign,
                _ => {}
            }
        }
    }
    // Jacobi phase: n odd positive from here on
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            match n % 8 {
                3 | 5 => sign = -sign,
                _ => {}
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Is `d > 0` a fundamental discriminant?  (`d = 1` counts; callers that
/// want the trivial twist excluded filter it themselves.)
pub fn is_fundamental(d: u64, squarefree: &[bool]) -> bool {
    if d == 1 {
        return true;
    }
    if d % 4 == 1 {
        squarefree[d as usize]
    } else if d % 4 == 0 {
        let m = d / 4;
        (m % 4 == 2 || m % 4 == 3) && squarefree[m as usize]
    } else {
        false
    }
}

/// Ascending positive fundamental discriminants up to `x`.
pub fn fundamental_discriminants(x: u64, include_one: bool) -> Result<Vec<u64>> {
    let sf = squarefree_sieve(x)?;
    let mut out = Vec::new();
    for d in 1..=x {
        if d == 1 {
            if include_one {
                out.push(1);
            }
            continue;
        }
        if is_fundamental(d, &sf) {
            out.push(d);
        }
    }
    Ok(out)
}

/// How membership in the twist family is decided.
///
/// For a positive discriminant and root number `+1` the two rules select the
/// same set; both are kept so the equivalence can be checked rather than
/// assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Selector {
    /// `(d | M) = 1`: the conductor is a square modulo the twisting modulus.
    ResidueSquare,
    /// `(d | -M) * omega = 1`: the twisted functional equation is even.
    TwistSign,
}

/// Character statistics of one integer against the whole family:
/// `sum = Σ_d (d | n)` and the number of members divisible by `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CharStats {
    pub sum: i64,
    pub divisible: u64,
}

/// The family of real quadratic twists: positive fundamental discriminants
/// `d <= x` passing the selector for modulus `m`.
#[derive(Clone, Debug, Serialize)]
pub struct Family {
    pub x: u64,
    pub modulus: u64,
    pub omega: i32,
    pub selector: Selector,
    pub members: Vec<u64>,
}

impl Family {
    pub fn build(
        x: u64,
        modulus: u64,
        omega: i32,
        selector: Selector,
        include_one: bool,
    ) -> Result<Family> {
        if modulus < 2 || moebius(modulus) == 0 {
            return Err(Error::domain(
                "family",
                format!("modulus {modulus} must be squarefree and at least 2"),
            ));
        }
        if omega != 1 && omega != -1 {
            return Err(Error::domain("family", format!("omega {omega} must be ±1")));
        }
        let keep = |d: u64| -> bool {
            match selector {
                Selector::ResidueSquare => kronecker(d as i64, modulus as i64) == 1,
                Selector::TwistSign => kronecker(d as i64, -(modulus as i64)) * omega == 1,
            }
        };
        let members = fundamental_discriminants(x, include_one)?
            .into_iter()
            .filter(|&d| keep(d))
            .collect();
        Ok(Family {
            x,
            modulus,
            omega,
            selector,
            members,
        })
    }

    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }

    /// `Σ_d (d | n)` and `#{d : n | d}` over the family.
    pub fn char_stats(&self, n: u64) -> CharStats {
        let mut sum = 0i64;
        let mut divisible = 0u64;
        for &d in &self.members {
            let k = kronecker(d as i64, n as i64);
            sum += k as i64;
            if n > 0 && d % n == 0 {
                divisible += 1;
            }
        }
        CharStats { sum, divisible }
    }

    /// Character statistics for a batch of moduli, evaluated in parallel.
    /// The output preserves the order of `ns`, so downstream folds are
    /// deterministic.
    pub fn char_table(&self, ns: &[u64]) -> Vec<CharStats> {
        ns.par_iter().map(|&n| self.char_stats(n)).collect()
    }
}

/// `p^k` unless it would exceed `cap`.
pub fn checked_pow(p: u64, k: u32, cap: u64) -> Option<u64> {
    let mut v: u64 = 1;
    for _ in 0..k {
        v = v.checked_mul(p)?;
        if v > cap {
            return None;
        }
    }
    Some(v)
}

/// If `n = p^k` for a prime `p` in the supplied ascending list, return
/// `(p, k)`.  Returns `None` when no listed prime divides `n` or when a
/// cofactor survives.
pub fn prime_power_decompose(n: u64, primes: &[u64]) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    for &p in primes {
        if p * p > n && n > 1 {
            // n itself is prime iff it is in range of the list's coverage;
            // treat a leftover prime above every listed prime as covered
            // only when it literally equals n and divides cleanly below.
            break;
        }
        if n % p == 0 {
            let mut m = n;
            let mut k = 0u32;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
    }
    if primes.binary_search(&n).is_ok() {
        return Some((n, 1));
    }
    None
}

pub use crate::util::gcd_u64 as gcd;

/// `gcd(n, m) == 1`.
pub fn coprime(n: u64, m: u64) -> bool {
    gcd_u64(n, m) == 1
}

/// Perfect square test.
pub fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}
