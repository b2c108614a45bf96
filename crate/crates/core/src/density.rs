//! One-level density of low-lying zeros across the quadratic twist family.
//!
//! For each member `d` the zeros of the twisted L-function near the central
//! point are sampled through a band-limited window `g` rescaled by
//! `L = ln(sqrt(M) x / (2 pi))`.  The explicit formula converts the family
//! average of those samples into an archimedean mean, conductor powers, and
//! prime sums.  Two independent reductions of the prime sums are computed:
//!
//! * the *closed* route replaces every even character square by its exact
//!   divisibility count and folds the resulting divisor-weighted sum with a
//!   principal-value integral against `-zeta'/zeta + (sym^2 L)'/L` minus a
//!   mediating conductor series, which together restore the central kernel
//!   `g(0)/2`;
//! * the *direct* route keeps the raw character statistics of this finite
//!   family, so its prime terms carry the genuine fluctuation of the
//!   quadratic symbols.
//!
//! Their difference is the finite-size error the pipeline is built to
//! measure; `envelope` records the scale it is expected to live under.

use crate::arith::{Family, Selector};
use crate::curve::{power_sum, Curve, HeckeTable};
use crate::error::{Error, Result};
use crate::special::{conductor_series, digamma, sym2_log_deriv_freq, zeta_log_deriv};
use crate::testfn::{integrate_symmetric, QuadSpec, TestFunction};
use crate::util::{kahan_sum, Kahan, KahanC};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Logarithmic scale of the family at cutoff `x`: `ln(sqrt(M) x / (2 pi))`.
pub fn scaling_log(modulus: u64, x: u64) -> f64 {
    0.5 * (modulus as f64).ln() + (x as f64).ln() - (2.0 * PI).ln()
}

/// Per-member analytic-conductor log `t_d = ln(sqrt(M) d / (2 pi))`.
pub fn twist_log(modulus: u64, d: u64) -> f64 {
    0.5 * (modulus as f64).ln() + (d as f64).ln() - (2.0 * PI).ln()
}

/// Smooth census prediction for the family size: positive fundamental
/// discriminants have density `3/pi^2`, and the residue-square condition
/// keeps `M/(2(M+1))` of them for prime modulus `M`.
pub fn census_main_term(x: u64, modulus: u64) -> f64 {
    let mf = modulus as f64;
    3.0 / (PI * PI) * x as f64 * mf / (2.0 * (mf + 1.0))
}

/// `sum_d exp(-2 pi i z t_d / l)` over the stored conductor logs.
///
/// Real `z` takes a polar fast path; complex `z` additionally weights each
/// member by `exp(-2 pi Im(z) t_d / l)`.
pub fn twisted_log_sum(twist_logs: &[f64], l: f64, z: Complex64) -> Complex64 {
    let mut acc = KahanC::new();
    if z.im == 0.0 {
        for &t in twist_logs {
            acc.add(Complex64::from_polar(1.0, -2.0 * PI * z.re * t / l));
        }
    } else {
        let w = -2.0 * PI * Complex64::i() * z / l;
        for &t in twist_logs {
            acc.add((w * t).exp());
        }
    }
    acc.value()
}

/// Smooth main term of [`twisted_log_sum`] for a family of `n` members at
/// cutoff scale `l`: partial summation of the member count against the
/// twisted weight leaves `n e^{-2 pi i z} / (1 - 2 pi i z / l)` up to a
/// square-root-of-family error.
pub fn twisted_log_main(n: u64, l: f64, z: Complex64) -> Complex64 {
    let two_pi_i_z = 2.0 * PI * Complex64::i() * z;
    n as f64 * (-two_pi_i_z).exp() / (1.0 - two_pi_i_z / l)
}

/// Everything `run` needs to know up front.
#[derive(Clone, Debug, Serialize)]
pub struct DensityConfig {
    pub curve: Curve,
    /// Discriminant cutoff.
    pub x: u64,
    pub test_function: TestFunction,
    pub selector: Selector,
    /// Whether `d = 1` (the untwisted curve) joins the family.
    pub include_one: bool,
    /// Cap on `|family| * #primes` character evaluations.
    pub char_budget: u64,
    /// Extrapolated-tail target for the principal-value integrals.
    pub tail_eps: f64,
}

impl DensityConfig {
    pub fn new(curve: Curve, x: u64, test_function: TestFunction) -> DensityConfig {
        DensityConfig {
            curve,
            x,
            test_function,
            selector: Selector::ResidueSquare,
            include_one: false,
            char_budget: 20_000_000_000,
            tail_eps: 1e-6,
        }
    }
}

/// The additive pieces of the averaged explicit formula.  The first five
/// fields compose `total_closed`; `total_direct` swaps the two even-route
/// prime terms for their finite-family counterparts and adds the odd-power
/// character remainder.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityBreakdown {
    /// Archimedean mean `sum_d t_d / (L X*) + (1/L) int g Re psi(1 + i pi tau / L)`.
    pub gamma_term: f64,
    /// Conductor prime, even powers (hat-side sum).
    pub conductor_even: f64,
    /// `g(0)/2` plus the principal-value integral of the closed bracket.
    pub good_prime_even: f64,
    /// Divisor-weighted even powers `(1/L) sum_p ln p/(p+1) sum_j q_{2j} p^{-j} hat g`.
    pub divisor_even: f64,
    /// Conductor prime, odd powers.
    pub conductor_odd: f64,
    /// Odd prime powers against the exact family character sums.
    pub good_prime_odd_remainder: f64,
    pub total_closed: f64,
    pub total_direct: f64,
    /// `x^{-(1-sigma)/2} (ln x)^6`, the scale the two totals should agree at.
    pub envelope: f64,
}

/// A finished density computation with the data later stages reuse.
#[derive(Clone, Debug)]
pub struct DensityRun {
    pub config: DensityConfig,
    pub family: Family,
    pub hecke: HeckeTable,
    /// `t_d` per member, in member order.
    pub twist_logs: Vec<f64>,
    pub scaling_log: f64,
    /// `g(0)/2`, the even-symmetry central kernel.
    pub g0_half: f64,
    pub breakdown: DensityBreakdown,
}

/// Quadrature settings shared by every integral in the pipeline.  The tail
/// target is deliberately looser than the self-test quadratures: the
/// fluctuating zeta factor makes the increments quasi-random, so pushing
/// below `1e-6` costs an enormous cutoff while every comparison downstream
/// is dominated by genuine finite-family discrepancies.
///
/// The first cutoff is rounded up to a whole number of kernel oscillation
/// periods `1/sigma`; every doubled window then covers whole periods too,
/// so successive increments carry no window phase and the extrapolation
/// sees a clean geometric tail at any support width.
pub(crate) fn pipeline_quad_spec(tail_eps: f64, sigma: f64) -> QuadSpec {
    QuadSpec {
        initial_half_width: (16.0 * sigma).ceil() / sigma,
        panel_width: 1.0,
        max_half_width: 8192.0,
        tail_eps,
        min_doublings: 2,
    }
}

/// `-(ln M / L) sum_{k >= 1} M^{-2k} hat g(k ln M / L)`.
pub(crate) fn conductor_hat_even(tf: &TestFunction, modulus: u64, l: f64) -> f64 {
    let mf = modulus as f64;
    let lnm = mf.ln();
    let mut acc = Kahan::new();
    let mut k: i32 = 1;
    while k as f64 * lnm / l < tf.sigma() {
        acc.add(mf.powi(-2 * k) * tf.hat(k as f64 * lnm / l));
        k += 1;
    }
    -lnm / l * acc.value()
}

/// `-(omega ln M / L) sum_{k >= 0} M^{-(2k+1)} hat g((2k+1) ln M / (2L))`.
pub(crate) fn conductor_hat_odd(tf: &TestFunction, modulus: u64, l: f64, omega: i32) -> f64 {
    let mf = modulus as f64;
    let lnm = mf.ln();
    let mut acc = Kahan::new();
    let mut j: i32 = 1;
    while j as f64 * lnm / (2.0 * l) < tf.sigma() {
        acc.add(mf.powi(-j) * tf.hat(j as f64 * lnm / (2.0 * l)));
        j += 2;
    }
    -(omega as f64) * lnm / l * acc.value()
}

/// Hat-side image of the mediating conductor series:
/// `(1/L) sum_{k >= 1} (M^k - 1) ln M M^{-2k} hat g(k ln M / L)`.
pub(crate) fn mediator_hat_sum(tf: &TestFunction, modulus: u64, l: f64) -> f64 {
    let mf = modulus as f64;
    let lnm = mf.ln();
    let mut acc = Kahan::new();
    let mut k: i32 = 1;
    while k as f64 * lnm / l < tf.sigma() {
        acc.add((mf.powi(k) - 1.0) * lnm * mf.powi(-2 * k) * tf.hat(k as f64 * lnm / l));
        k += 1;
    }
    acc.value() / l
}

/// Run the full averaged explicit formula at one cutoff.
pub fn run(config: DensityConfig) -> Result<DensityRun> {
    let curve = config.curve;
    if curve.omega != 1 {
        return Err(Error::domain(
            "density",
            "only even functional equations are modeled; omega must be +1",
        ));
    }
    let tf = config.test_function;
    let sigma = tf.sigma();
    let modulus = curve.conductor;
    let l = scaling_log(modulus, config.x);
    if !(l > 1.0) {
        return Err(Error::domain(
            "density",
            format!("cutoff {} gives scaling log {l:.3}, too small to resolve", config.x),
        ));
    }

    let family = Family::build(
        config.x,
        modulus,
        curve.omega,
        config.selector,
        config.include_one,
    )?;
    let xstar = family.size();
    if xstar == 0 {
        return Err(Error::domain("density", "empty family at this cutoff"));
    }
    let xf = xstar as f64;

    // support caps: even squares live below e^{L sigma}, odd powers below
    // e^{2 L sigma}, and the frequency-side symmetric-square bracket is
    // truncated a fifth of a bandwidth past the window edge
    let p_even_cap = (l * sigma).exp().floor() as u64;
    let p_direct_cap = (2.0 * l * sigma).exp().floor() as u64;
    let sym2_cut = l * (sigma + 0.2);
    let build_to = p_even_cap
        .max(p_direct_cap)
        .max(sym2_cut.exp().floor() as u64)
        .max(1000);
    let hecke = HeckeTable::build(&curve, build_to)?;

    let twist_logs: Vec<f64> = family.members.iter().map(|&d| twist_log(modulus, d)).collect();
    let sum_t = kahan_sum(twist_logs.iter().copied());

    // the one pass that touches per-member character values
    let odd_pairs: Vec<(u64, f64)> = hecke.good_primes(p_direct_cap).collect();
    let odd_primes: Vec<u64> = odd_pairs.iter().map(|&(p, _)| p).collect();
    let char_cost = xstar as u128 * odd_primes.len() as u128;
    if char_cost > config.char_budget as u128 {
        return Err(Error::Capacity {
            what: "family character sums",
            requested: char_cost.min(u64::MAX as u128) as u64,
            budget: config.char_budget,
        });
    }
    let char_stats = family.char_table(&odd_primes);

    let spec = pipeline_quad_spec(config.tail_eps, sigma);

    // archimedean mean
    let gamma_quad = integrate_symmetric(
        &|tau: f64| {
            let psi = digamma(Complex64::new(1.0, PI * tau / l))
                .expect("argument stays in the right half-plane");
            Complex64::new(tf.eval(tau) * psi.re, 0.0)
        },
        &spec,
    )?;
    let gamma_term = sum_t / (l * xf) + gamma_quad.value.re / l;

    let conductor_even = conductor_hat_even(&tf, modulus, l);
    let conductor_odd = conductor_hat_odd(&tf, modulus, l, curve.omega);
    let g0_half = 0.5 * tf.value_at_zero();

    // closed even route: the principal value of the bracket
    // -zeta'/zeta(s) + (sym^2 L)'/L(s) - mediator(s + 1) on Re s = 1
    // contributes everything except the central kernel, which the
    // half-residue of the zeta pole restores exactly as g(0)/2
    let pv_quad = integrate_symmetric(
        &|tau: f64| {
            let s = Complex64::new(1.0, 2.0 * PI * tau / l);
            let bracket = -zeta_log_deriv(s).expect("s is off the pole at every node")
                + sym2_log_deriv_freq(&hecke, s, sym2_cut).expect("table covers the cut")
                - conductor_series(modulus, s + 1.0).expect("Re(s + 1) = 2");
            Complex64::new(tf.eval(tau) * bracket.re, 0.0)
        },
        &spec,
    )?;
    let good_prime_even = g0_half + pv_quad.value.re / l;

    // even prime powers: the divisor-weighted closed sum and the direct
    // finite-family sum share the same inner (p, j) kernel
    let mut divisor_acc = Kahan::new();
    let mut direct_even_acc = Kahan::new();
    for (&(p, lambda), stats) in odd_pairs.iter().zip(&char_stats) {
        if p > p_even_cap {
            break; // primes are sorted; the even range is a prefix
        }
        let pf = p as f64;
        let lnp = pf.ln();
        let mut inner = Kahan::new();
        let mut j: i32 = 1;
        while j as f64 * lnp / l < sigma {
            inner.add(power_sum(lambda, 2 * j as u32) * pf.powi(-j) * tf.hat(j as f64 * lnp / l));
            j += 1;
        }
        let inner = inner.value();
        divisor_acc.add(lnp / (pf + 1.0) * inner);
        direct_even_acc.add((xf - stats.divisible as f64) * lnp * inner);
    }
    let divisor_even = divisor_acc.value() / l;
    let good_even_direct = -direct_even_acc.value() / (xf * l);

    // odd prime powers against the exact character sums; the symbol at an
    // odd power equals the symbol itself, so one statistic per prime serves
    // every exponent
    let mut odd_acc = Kahan::new();
    for (&(p, lambda), stats) in odd_pairs.iter().zip(&char_stats) {
        let pf = p as f64;
        let lnp = pf.ln();
        let s_p = stats.sum as f64;
        let mut j: i32 = 1;
        while j as f64 * lnp / (2.0 * l) < sigma {
            odd_acc.add(
                s_p * lnp
                    * power_sum(lambda, j as u32)
                    * pf.powf(-0.5 * j as f64)
                    * tf.hat(j as f64 * lnp / (2.0 * l)),
            );
            j += 2;
        }
    }
    let good_prime_odd_remainder = -odd_acc.value() / (xf * l);

    let total_closed = gamma_term + conductor_even + good_prime_even + divisor_even + conductor_odd;
    let total_direct =
        gamma_term + conductor_even + conductor_odd + good_even_direct + good_prime_odd_remainder;
    let xd = config.x as f64;
    let envelope = xd.powf(-0.5 * (1.0 - sigma)) * xd.ln().powi(6);

    Ok(DensityRun {
        config,
        family,
        hecke,
        twist_logs,
        scaling_log: l,
        g0_half,
        breakdown: DensityBreakdown {
            gamma_term,
            conductor_even,
            good_prime_even,
            divisor_even,
            conductor_odd,
            good_prime_odd_remainder,
            total_closed,
            total_direct,
            envelope,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_log_reference_values() {
        assert!((scaling_log(11, 1_000) - 6.268825848971977).abs() < 1e-12);
        assert!((scaling_log(11, 10_000) - 8.571410941966023).abs() < 1e-12);
        assert!((scaling_log(11, 100_000) - 10.873996034960069).abs() < 1e-12);
        assert!((scaling_log(11, 1_000_000) - 13.176581127954115).abs() < 1e-12);
        // the member at d = x contributes exactly the family scale
        assert_eq!(twist_log(11, 10_000), scaling_log(11, 10_000));
    }

    #[test]
    fn census_tracks_family_size() {
        let fam = Family::build(10_000, 11, 1, Selector::ResidueSquare, false).unwrap();
        assert_eq!(fam.size(), 1390);
        let main = census_main_term(10_000, 11);
        assert!((main - fam.size() as f64).abs() < 5.0 * (10_000f64).sqrt());
    }

    #[test]
    fn conductor_hat_sums_with_a_single_surviving_term() {
        // sigma = 0.5, L chosen so only k = 1 (even) and k = 0 (odd) fit
        let tf = TestFunction::fejer(0.5).unwrap();
        let l = 6.0;
        let lnm = 11f64.ln();
        let even = conductor_hat_even(&tf, 11, l);
        assert!((even - (-lnm / l * 11f64.powi(-2) * tf.hat(lnm / l))).abs() < 1e-15);
        let odd = conductor_hat_odd(&tf, 11, l, 1);
        assert!((odd - (-lnm / l / 11.0 * tf.hat(lnm / (2.0 * l)))).abs() < 1e-15);
        let med = mediator_hat_sum(&tf, 11, l);
        assert!((med - 10.0 * lnm / 121.0 * tf.hat(lnm / l) / l).abs() < 1e-15);
        // both conductor sums shrink the density
        assert!(even < 0.0 && odd < 0.0 && med > 0.0);
    }

    #[test]
    fn conductor_hat_sums_include_higher_powers() {
        // larger L lets k = 2 into the even window; check the two-term value
        let tf = TestFunction::fejer(0.5).unwrap();
        let l = 12.0;
        let lnm = 11f64.ln();
        let want = -lnm / l
            * (11f64.powi(-2) * tf.hat(lnm / l) + 11f64.powi(-4) * tf.hat(2.0 * lnm / l));
        assert!((conductor_hat_even(&tf, 11, l) - want).abs() < 1e-15);
    }

    #[test]
    fn twisted_log_sum_matches_naive_evaluation() {
        let logs: Vec<f64> = [5u64, 12, 21, 28]
            .iter()
            .map(|&d| twist_log(11, d))
            .collect();
        let l = 6.0;
        for z in [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.5, 0.0),
            Complex64::new(1.0, -0.4),
        ] {
            let fast = twisted_log_sum(&logs, l, z);
            let mut slow = Complex64::new(0.0, 0.0);
            for &t in &logs {
                slow += (-2.0 * PI * Complex64::i() * z * t / l).exp();
            }
            assert!((fast - slow).norm() < 1e-12);
        }
        // z = 0 degenerates to the member count
        let at_zero = twisted_log_sum(&logs, l, Complex64::new(0.0, 0.0));
        assert!((at_zero - Complex64::new(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn twisted_log_main_tracks_the_exact_sum() {
        // small cutoff, both weightings; the closed form should sit within
        // a square-root-of-family error of the exact member sum
        let x = 1_000u64;
        let fam = Family::build(x, 11, 1, Selector::ResidueSquare, false).unwrap();
        let l = scaling_log(11, x);
        let logs: Vec<f64> = fam.members.iter().map(|&d| twist_log(11, d)).collect();
        let n = fam.size();
        let xf = x as f64;
        for tau in [1.0, 5.0] {
            let z0 = Complex64::new(tau, 0.0);
            let diff0 = (twisted_log_sum(&logs, l, z0) - twisted_log_main(n, l, z0)).norm();
            assert!(diff0 <= 5.0 * xf.sqrt() * xf.ln(), "unweighted diff {diff0}");
            let zhalf = Complex64::new(tau, -0.5 * l / (2.0 * PI));
            let diffh = (twisted_log_sum(&logs, l, zhalf) - twisted_log_main(n, l, zhalf)).norm();
            assert!(diffh <= 5.0 * xf.ln(), "weighted diff {diffh}");
        }
    }

    #[test]
    fn rejects_odd_sign_families() {
        let curve = Curve::new([0, -1, 1, -10, -20], 11, -1).unwrap();
        let cfg = DensityConfig::new(curve, 1_000, TestFunction::fejer(0.5).unwrap());
        assert!(run(cfg).is_err());
    }

    #[test]
    fn full_run_small_cutoff_sanity() {
        let cfg = DensityConfig::new(Curve::eleven_a1(), 1_000, TestFunction::fejer(0.5).unwrap());
        let out = run(cfg).unwrap();
        let b = out.breakdown;
        for v in [
            b.gamma_term,
            b.conductor_even,
            b.good_prime_even,
            b.divisor_even,
            b.conductor_odd,
            b.good_prime_odd_remainder,
            b.total_closed,
            b.total_direct,
        ] {
            assert!(v.is_finite());
        }
        assert_eq!(out.g0_half, 0.25);
        // one-level density of an even orthogonal family at sigma = 1/2 sits
        // near 1 + sigma/2; finite-size wobble stays well inside these rails
        assert!(b.total_closed > 0.7 && b.total_closed < 1.8, "closed {}", b.total_closed);
        assert!(b.total_direct > 0.5 && b.total_direct < 2.0, "direct {}", b.total_direct);
        assert!(
            (b.total_direct - b.total_closed).abs() < 0.5,
            "routes drifted apart: {} vs {}",
            b.total_direct,
            b.total_closed
        );
        // component magnitudes stay tame
        assert!(b.gamma_term.abs() < 2.0);
        assert!(b.good_prime_even.abs() < 2.0);
        assert!(b.divisor_even.abs() < 1.0);
        assert!(b.good_prime_odd_remainder.abs() < 1.0);
    }
}
