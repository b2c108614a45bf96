//! Adaptive quadrature for even integrands on the whole line.
//!
//! The integrand is sampled as `f(tau) + f(-tau)` over panels covering
//! `[0, T]`, so nothing is ever evaluated at `tau = 0` and odd principal
//! value singularities cancel pointwise before any weight is applied.
//! `T` doubles until an iterated Shanks extrapolation of the partial
//! integrals stabilises; that handles both `c/T`-type means and slowly
//! decaying oscillatory tails without demanding absurd cutoffs.

use crate::error::{Error, Result};
use crate::util::KahanC;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::OnceLock;

const GL_ORDER: usize = 32;

struct GaussLegendre {
    /// nodes in (0, 1), symmetric about 1/2
    nodes: [f64; GL_ORDER],
    weights: [f64; GL_ORDER],
}

/// `P_n(x)` and `P_{n-1}(x)` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            // Chebyshev-flavoured initial guess, then Newton
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..60 {
                let (p, pm1) = legendre_pair(n, x);
                let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (p, pm1) = legendre_pair(n, x);
            let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            debug_assert!(p.abs() < 1e-13);
            nodes[i] = 0.5 * (1.0 + x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    })
}

/// Controls for [`integrate_symmetric`].
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    /// first cutoff `T`
    pub initial_half_width: f64,
    /// width of each Gauss panel
    pub panel_width: f64,
    /// give up beyond this cutoff
    pub max_half_width: f64,
    /// stop when the extrapolated value moves less than this
    pub tail_eps: f64,
    /// demand at least this many doublings before trusting convergence
    pub min_doublings: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            initial_half_width: 16.0,
            panel_width: 1.0,
            max_half_width: 1024.0,
            tail_eps: 1e-8,
            min_doublings: 2,
        }
    }
}

impl QuadSpec {
    pub fn with_tail_eps(mut self, eps: f64) -> Self {
        self.tail_eps = eps;
        self
    }

    pub fn with_max_half_width(mut self, t: f64) -> Self {
        self.max_half_width = t;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.initial_half_width > 0.0
            && self.panel_width > 0.0
            && self.max_half_width >= self.initial_half_width
            && self.tail_eps > 0.0
            && [
                self.initial_half_width,
                self.panel_width,
                self.max_half_width,
                self.tail_eps,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::domain("quadrature", format!("bad spec {self:?}")))
        }
    }
}

/// Converged integral with diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: Complex64,
    /// last observed movement of the extrapolated value
    pub tail: f64,
    /// cutoff actually reached
    pub half_width: f64,
    pub evaluations: u64,
}

/// Sum of Gauss panels over `[a, b]`, each panel sampling `f(tau) + f(-tau)`.
fn panel_sum<F>(f: &F, a: f64, b: f64, panel_width: f64) -> (Complex64, u64)
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let rule = gauss_legendre();
    let count = (((b - a) / panel_width).ceil() as usize).max(1);
    let step = (b - a) / count as f64;
    let parts: Vec<Complex64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let lo = a + step * i as f64;
            let mut acc = KahanC::default();
            for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let tau = lo + step * x;
                acc.add((f(tau) + f(-tau)) * w);
            }
            acc.value() * step
        })
        .collect();
    let mut total = KahanC::default();
    for p in parts {
        total.add(p);
    }
    (total.value(), (count * 2 * GL_ORDER) as u64)
}

/// One Shanks sweep over a sequence of partial values.
fn shanks(seq: &[Complex64]) -> Vec<Complex64> {
    if seq.len() < 3 {
        return seq.to_vec();
    }
    let mut out = Vec::with_capacity(seq.len() - 2);
    for win in seq.windows(3) {
        let (a, b, c) = (win[0], win[1], win[2]);
        let d1 = b - a;
        let d2 = c - b;
        let den = d2 - d1;
        // a dead tail or an exactly geometric one can make the
        // denominator underflow; the raw endpoint is then already right
        if den.norm() < 1e-14 * (d1.norm() + d2.norm()) || den.norm() == 0.0 {
            out.push(c);
        } else {
            out.push(c - d2 * d2 / den);
        }
    }
    out
}

/// Best available estimate from a doubling sequence: two Shanks sweeps
/// when the sequence is long enough, fewer otherwise.
fn extrapolate(partials: &[Complex64]) -> Complex64 {
    let s1 = shanks(partials);
    let s2 = shanks(&s1);
    *s2.last().or(s1.last()).unwrap_or(partials.last().unwrap())
}

/// Integrate an even-symmetrised integrand over the real line.
///
/// `f` is only ever called at `tau != 0`; the `f(tau) + f(-tau)` pairing
/// happens per node, so odd parts (including `1/tau` poles) drop out
/// before weighting.  Fails with [`Error::QuadratureDiverged`] when the
/// cutoff cap is reached without the extrapolated value settling.
pub fn integrate_symmetric<F>(f: &F, spec: &QuadSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    spec.validate()?;
    let mut evaluations = 0u64;
    let (first, n0) = panel_sum(f, 0.0, spec.initial_half_width, spec.panel_width);
    evaluations += n0;
    let mut partials = vec![first];
    let mut half_width = spec.initial_half_width;
    let mut best = first;
    let mut doublings = 0u32;
    let mut tail = f64::INFINITY;

    while half_width < spec.max_half_width * (1.0 - 1e-12) {
        let next = (2.0 * half_width).min(spec.max_half_width);
        let (delta, n) = panel_sum(f, half_width, next, spec.panel_width);
        evaluations += n;
        partials.push(*partials.last().unwrap() + delta);
        half_width = next;
        doublings += 1;

        let candidate = extrapolate(&partials);
        tail = (candidate - best).norm();
        best = candidate;
        // Shanks maps even a divergent geometric sequence to its formal
        // limit, so never trust it while the raw increments are growing
        let n = partials.len();
        let raw_ok = n >= 3 && {
            let d2 = (partials[n - 1] - partials[n - 2]).norm();
            let d1 = (partials[n - 2] - partials[n - 3]).norm();
            d2 <= 1.25 * d1 || d1.max(d2) < 0.5 * spec.tail_eps
        };
        if doublings >= spec.min_doublings && raw_ok && tail < spec.tail_eps {
            return Ok(Quadrature {
                value: best,
                tail,
                half_width,
                evaluations,
            });
        }
    }
    Err(Error::QuadratureDiverged {
        half_width,
        tail,
        target: spec.tail_eps,
    })
}
