//! The reference elliptic curve, local point counts, and normalized Hecke
//! eigenvalues.
//!
//! The model is a global minimal long Weierstrass equation with prime
//! conductor `M`.  At the conductor the reduction is multiplicative and the
//! local trace is identified with the sign of the functional equation, which
//! holds for the reference curve; the normalized eigenvalue there is
//! `omega / sqrt(M)`.

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Long Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
/// together with its conductor and root number.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Curve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub omega: i32,
}

impl Curve {
    /// The curve of conductor 11 used throughout:
    /// `y^2 + y = x^3 - x^2 - 10x - 20`.
    pub fn eleven_a1() -> Curve {
        Curve {
            a1: 0,
            a2: -1,
            a3: 1,
            a4: -10,
            a6: -20,
            conductor: 11,
            omega: 1,
        }
    }

    pub fn new(a: [i64; 5], conductor: u64, omega: i32) -> Result<Curve> {
        let c = Curve {
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a6: a[4],
            conductor,
            omega,
        };
        if omega != 1 && omega != -1 {
            return Err(Error::domain("curve", format!("omega {omega} must be ±1")));
        }
        if c.discriminant() == 0 {
            return Err(Error::domain("curve", "singular model (zero discriminant)"));
        }
        if conductor < 2 || !is_prime(conductor) {
            return Err(Error::domain(
                "curve",
                format!("conductor {conductor} must be prime"),
            ));
        }
        if c.discriminant() % conductor as i128 != 0 {
            return Err(Error::domain(
                "curve",
                format!("conductor {conductor} does not divide the discriminant"),
            ));
        }
        Ok(c)
    }

    /// `b2, b4, b6, b8`.
    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    /// `c4, c6`.
    pub fn c_invariants(&self) -> (i128, i128) {
        let (b2, b4, b6, _) = self.b_invariants();
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        (c4, c6)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Trace of Frobenius at `p`.
    ///
    /// Good primes are counted directly: `p >= 5` on the short model
    /// `y^2 = x^3 + Ax + B` with `A = -27 c4`, `B = -54 c6` via a quadratic
    /// residue table in `O(p)`, and `p = 2, 3` on the long model in
    /// `O(p^2)`.  At the conductor the multiplicative-reduction convention
    /// returns `omega`.
    pub fn ap(&self, p: u64) -> Result<i64> {
        if p < 2 {
            return Err(Error::domain("ap", format!("p = {p} is not prime")));
        }
        if p == self.conductor {
            return Ok(self.omega as i64);
        }
        if p > 1_000_000_000 {
            // the residue table is O(p) in time and memory
            return Err(Error::Capacity {
                what: "point count",
                requested: p,
                budget: 1_000_000_000,
            });
        }
        if self.discriminant().unsigned_abs() % p as u128 == 0 {
            return Err(Error::BadReduction { p });
        }
        if p < 5 {
            return Ok(self.ap_long_form(p));
        }
        Ok(self.ap_short_form(p))
    }

    fn ap_long_form(&self, p: u64) -> i64 {
        let m = p as i64;
        let rm = |v: i64| v.rem_euclid(m);
        let mut affine = 0i64;
        for x in 0..m {
            let rhs = rm(rm(rm(x * x * x) + rm(self.a2 * x * x)) + rm(self.a4 * x) + rm(self.a6));
            for y in 0..m {
                let lhs = rm(rm(y * y) + rm(self.a1 * x * y) + rm(self.a3 * y));
                if lhs == rhs {
                    affine += 1;
                }
            }
        }
        m - affine
    }

    fn ap_short_form(&self, p: u64) -> i64 {
        let (c4, c6) = self.c_invariants();
        let m = p as i128;
        let a = (-27 * c4).rem_euclid(m) as u64;
        let b = (-54 * c6).rem_euclid(m) as u64;
        // chi[u] over F_p via one pass of squares
        let mut is_square = vec![false; p as usize];
        let mut x = 0u64;
        while x <= p / 2 {
            is_square[(x * x % p) as usize] = true;
            x += 1;
        }
        let chi = |u: u64| -> i64 {
            if u == 0 {
                0
            } else if is_square[u as usize] {
                1
            } else {
                -1
            }
        };
        let mut sum = 0i64;
        for x in 0..p {
            let x2 = x * x % p;
            let x3 = x2 * x % p;
            let v = (x3 + a * x % p + b) % p;
            sum += chi(v);
        }
        -sum
    }

    /// Analytically normalized eigenvalue `a_p / sqrt(p)` (and
    /// `omega / sqrt(M)` at the conductor).
    pub fn lambda(&self, p: u64) -> Result<f64> {
        Ok(self.ap(p)? as f64 / (p as f64).sqrt())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `alpha^m + beta^m` where `alpha, beta` are the roots of
/// `z^2 - lambda z + 1`.  Three-term recurrence; for `|lambda| <= 2` the
/// roots sit on the unit circle and the recurrence is non-amplifying.
pub fn power_sum(lambda: f64, m: u32) -> f64 {
    match m {
        0 => 2.0,
        1 => lambda,
        _ => {
            let mut prev = 2.0;
            let mut cur = lambda;
            for _ in 2..=m {
                let next = lambda * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Normalized Hecke eigenvalue `lambda(p^k)` at a good prime, from
/// `lambda(p)` by the Hecke recurrence
/// `lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})`.
pub fn hecke_power(lambda: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => lambda,
        _ => {
            let mut prev = 1.0;
            let mut cur = lambda;
            for _ in 2..=k {
                let next = lambda * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Precomputed traces and normalized eigenvalues for every prime up to a
/// limit, with the conductor entry following the multiplicative convention.
#[derive(Clone, Debug)]
pub struct HeckeTable {
    pub curve: Curve,
    /// Every prime `<= built_to` is present.
    pub built_to: u64,
    pub primes: Vec<u64>,
    pub ap: Vec<i64>,
    pub lambda: Vec<f64>,
}

impl HeckeTable {
    /// Count points at every prime up to `limit` (in parallel, collected in
    /// prime order).
    pub fn build(curve: &Curve, limit: u64) -> Result<HeckeTable> {
        let primes = primes_up_to(limit)?;
        let ap: Vec<i64> = primes
            .par_iter()
            .map(|&p| curve.ap(p))
            .collect::<Result<_>>()?;
        let lambda = primes
            .iter()
            .zip(&ap)
            .map(|(&p, &a)| a as f64 / (p as f64).sqrt())
            .collect();
        Ok(HeckeTable {
            curve: *curve,
            built_to: limit,
            primes,
            ap,
            lambda,
        })
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Largest prime covered.
    pub fn limit(&self) -> u64 {
        self.primes.last().copied().unwrap_or(0)
    }

    pub fn require(&self, limit: u64) -> Result<()> {
        if self.built_to < limit {
            return Err(Error::Coverage {
                needed: limit,
                available: self.built_to,
            });
        }
        Ok(())
    }

    /// Iterator over `(p, lambda_p)` for good primes `p <= cap`, skipping
    /// the conductor.
    pub fn good_primes(&self, cap: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        let m = self.curve.conductor;
        self.primes
            .iter()
            .copied()
            .zip(self.lambda.iter().copied())
            .take_while(move |&(p, _)| p <= cap)
            .filter(move |&(p, _)| p != m)
    }
}
