//! Riemann zeta and its logarithmic derivative by Euler-Maclaurin summation.
//!
//! The cutoff grows with the height of the argument, `N ~ 1.3 |Im s|`, so
//! the asymptotic tail stays far inside its region of rapid decay; with
//! twelve Bernoulli terms the truncation error is far below double
//! precision everywhere the pipeline evaluates.  Near `s = 1` the pole is
//! peeled off analytically: the regularized value `zeta(s) - 1/(s-1)` and
//! the combination `zeta'/zeta(1+u) + 1/u` are both computed without
//! cancellation.

use super::{expm1c, BERNOULLI};
use crate::error::{Error, Result};
use crate::util::KahanC;
use num_complex::Complex64;

const EM_TERMS: usize = 12;
const MAX_CUTOFF: f64 = 5.0e6;

fn cutoff(s: Complex64) -> Result<usize> {
    let n = (1.3 * s.im.abs()).ceil().max(50.0);
    if n > MAX_CUTOFF {
        return Err(Error::Capacity {
            what: "zeta cutoff",
            requested: n as u64,
            budget: MAX_CUTOFF as u64,
        });
    }
    Ok(n as usize)
}

fn check_domain(s: Complex64, op: &'static str) -> Result<()> {
    if !(s.re > 0.25) {
        return Err(Error::domain(
            op,
            format!("Re s = {} is outside the validated half-plane", s.re),
        ));
    }
    Ok(())
}

/// `(e^{-v} - 1) / v`, regular through `v = 0`.
fn em1_ratio(v: Complex64) -> Complex64 {
    if v.norm() < 1e-4 {
        -1.0 + v / 2.0 - v * v / 6.0 + v * v * v / 24.0
    } else {
        expm1c(-v) / v
    }
}

/// `(1 - e^{-v} (1 + v)) / v^2`, the regularized derivative kernel of the
/// peeled pole term.  Series for small `v`, direct otherwise.
fn bracket(v: Complex64) -> Complex64 {
    if v.norm() < 0.5 {
        // sum (-1)^k (k+1) v^k / (k+2)!
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 2.0; // (k+2)! starting at k = 0
        for k in 0..25u32 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * (k as f64 + 1.0) / fact * pow;
            pow *= v;
            fact *= (k + 3) as f64;
        }
        acc
    } else {
        let em = expm1c(-v); // e^{-v} - 1
        (-em - v * (em + 1.0)) / (v * v)
    }
}

struct EmCore {
    /// `zeta(s)` or, when peeled, `zeta(s) - 1/(s-1)`
    value: Complex64,
    /// `zeta'(s)` or, when peeled, `zeta'(s) + 1/(s-1)^2`
    deriv: Complex64,
}

fn em_core(s: Complex64, peel_pole: bool) -> Result<EmCore> {
    let n = cutoff(s)?;
    let nf = n as f64;
    let ln_n = nf.ln();
    let u = s - 1.0;
    let v = u * ln_n;

    let mut val = KahanC::new();
    let mut der = KahanC::new();
    for k in 1..n {
        let lk = (k as f64).ln();
        let t = (-s * lk).exp();
        val.add(t);
        der.add(-lk * t);
    }

    // N^{1-s} = e^{-v}; N^{-s} = e^{-v} / N
    let n_one_minus_s = (-v).exp();
    let n_minus_s = n_one_minus_s / nf;

    if peel_pole {
        // (N^{1-s} - 1)/(s - 1), written through v = (s - 1) ln N so the
        // limit at the pole is finite
        val.add(ln_n * em1_ratio(v));
        der.add(ln_n * ln_n * bracket(v));
    } else {
        val.add(n_one_minus_s / u);
        der.add((-ln_n * n_one_minus_s * u - n_one_minus_s) / (u * u));
    }

    val.add(n_minus_s / 2.0);
    der.add(-ln_n * n_minus_s / 2.0);

    // tail: sum_k B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{1-s-2k}
    let n_inv2 = 1.0 / (nf * nf);
    let mut rising = s; // product of (s + j), j = 0 .. 2k-2
    let mut recip_sum = 1.0 / s; // sum of 1/(s + j) over the same j
    let mut fact = 2.0; // (2k)!
    let mut scale = n_one_minus_s * n_inv2; // N^{1-s-2k}
    for (k, &b) in BERNOULLI.iter().enumerate().take(EM_TERMS) {
        let coeff = b / fact;
        let term = coeff * rising * scale;
        val.add(term);
        der.add(term * (recip_sum - ln_n));
        // advance to the next k: two more rising factors, two factorial
        // steps, one more N^{-2}
        let j0 = (2 * k + 1) as f64;
        let j1 = (2 * k + 2) as f64;
        rising *= (s + j0) * (s + j1);
        recip_sum += 1.0 / (s + j0) + 1.0 / (s + j1);
        fact *= (j1 + 1.0) * (j1 + 2.0);
        scale *= n_inv2;
    }

    Ok(EmCore {
        value: val.value(),
        deriv: der.value(),
    })
}

/// `zeta(s)` and `zeta'(s)`.
pub fn zeta_with_deriv(s: Complex64) -> Result<(Complex64, Complex64)> {
    check_domain(s, "zeta")?;
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::domain("zeta", "evaluation at the pole"));
    }
    let core = em_core(s, false)?;
    Ok((core.value, core.deriv))
}

/// The regular part `zeta(s) - 1/(s-1)`, stable arbitrarily close to the
/// pole (value at `s = 1` is Euler's constant).
pub fn zeta_minus_pole(s: Complex64) -> Result<Complex64> {
    check_domain(s, "zeta_minus_pole")?;
    Ok(em_core(s, true)?.value)
}

/// `zeta'/zeta(s)`.
pub fn zeta_log_deriv(s: Complex64) -> Result<Complex64> {
    check_domain(s, "zeta_log_deriv")?;
    let u = s - 1.0;
    if u.norm() < 0.5 {
        if u.norm() == 0.0 {
            return Err(Error::domain("zeta_log_deriv", "evaluation at the pole"));
        }
        Ok(zeta_log_deriv_regular(u)? - 1.0 / u)
    } else {
        let (z, dz) = zeta_with_deriv(s)?;
        Ok(dz / z)
    }
}

/// `zeta'/zeta(1+u) + 1/u`, regular through `u = 0` (value there is Euler's
/// constant).  With `R = zeta(1+u) - 1/u` this is `(R + u R') / (1 + u R)`.
pub fn zeta_log_deriv_regular(u: Complex64) -> Result<Complex64> {
    let s = 1.0 + u;
    check_domain(s, "zeta_log_deriv_regular")?;
    let core = em_core(s, true)?;
    Ok((core.value + u * core.deriv) / (1.0 + u * core.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.5772156649015329;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn values_on_the_real_axis() {
        let (z2, dz2) = zeta_with_deriv(c(2.0, 0.0)).unwrap();
        assert!(close(z2, c(1.6449340668482264, 0.0), 1e-13));
        assert!(close(dz2, c(-0.9375482543158438, 0.0), 1e-13));
        let (z3, _) = zeta_with_deriv(c(3.0, 0.0)).unwrap();
        assert!(close(z3, c(1.2020569031595943, 0.0), 1e-13));
        let (z25, _) = zeta_with_deriv(c(2.5, 0.0)).unwrap();
        assert!(close(z25, c(1.3414872572509172, 0.0), 1e-13));
        let (zhalf, _) = zeta_with_deriv(c(0.5, 0.0)).unwrap();
        assert!(close(zhalf, c(0.5396454911904132 - 2.0, 0.0), 1e-13));
    }

    #[test]
    fn values_on_the_one_line() {
        let (z, _) = zeta_with_deriv(c(1.0, 1.0)).unwrap();
        assert!(close(
            z,
            c(0.5821580597520036, -0.9268485643308071),
            1e-13
        ));
        let (z10, _) = zeta_with_deriv(c(1.0, 10.0)).unwrap();
        assert!(close(
            z10,
            c(1.3902873132374014, -0.1097851530663021),
            1e-13
        ));
        let (z03, _) = zeta_with_deriv(c(1.0, 0.3)).unwrap();
        assert!(close(
            z03,
            c(0.5776525162987899, -3.3114793535210251),
            1e-12
        ));
        let (z200, _) = zeta_with_deriv(c(1.0, 200.0)).unwrap();
        assert!(close(
            z200,
            c(2.5959090630701372, -1.0525862652278352),
            1e-11
        ));
    }

    #[test]
    fn log_deriv_values() {
        assert!(close(
            zeta_log_deriv(c(2.0, 0.0)).unwrap(),
            c(-0.5699609930945328, 0.0),
            1e-13
        ));
        assert!(close(
            zeta_log_deriv(c(1.0, 2.0)).unwrap(),
            c(0.4217978519712485, 0.2104365649650610),
            1e-13
        ));
        assert!(close(
            zeta_log_deriv(c(1.5, 100.0)).unwrap(),
            c(-0.2759638862324577, 0.0015993910555517),
            1e-11
        ));
        assert!(close(
            zeta_log_deriv(c(1.0, 200.0)).unwrap(),
            c(-1.0598254150089010, 0.3889230697987908),
            1e-11
        ));
    }

    #[test]
    fn regularized_values_near_the_pole() {
        assert!(close(
            zeta_minus_pole(c(1.0, 0.0)).unwrap(),
            c(EULER_GAMMA, 0.0),
            1e-13
        ));
        assert!(close(
            zeta_minus_pole(c(1.000001, 0.0)).unwrap(),
            c(0.5772157377173735, 0.0),
            1e-12
        ));
        assert!(close(
            zeta_minus_pole(c(1.0, 0.5)).unwrap(),
            c(0.5784330210993112, 0.0364505035470212),
            1e-13
        ));
        assert!(close(
            zeta_log_deriv_regular(c(0.0, 0.0)).unwrap(),
            c(EULER_GAMMA, 0.0),
            1e-13
        ));
        assert!(close(
            zeta_log_deriv_regular(c(0.001, 0.0)).unwrap(),
            c(0.5770281703425774, 0.0),
            1e-12
        ));
        assert!(close(
            zeta_log_deriv_regular(c(1e-6, 0.0)).unwrap(),
            c(0.5772154773553517, 0.0),
            1e-12
        ));
        assert!(close(
            zeta_log_deriv_regular(c(0.01, 0.02)).unwrap(),
            c(0.5753248579291761, -0.0037302207810329),
            1e-12
        ));
    }

    #[test]
    fn branches_agree_at_the_seam() {
        // |s - 1| = 0.5 is where zeta_log_deriv switches algorithms
        for &im in &[0.49, 0.5, 0.51] {
            let s = c(1.0, im);
            let direct = {
                let (z, dz) = zeta_with_deriv(s).unwrap();
                dz / z
            };
            let via_regular = zeta_log_deriv_regular(s - 1.0).unwrap() - 1.0 / (s - 1.0);
            assert!(close(direct, via_regular, 1e-11), "im = {im}");
            assert!(close(zeta_log_deriv(s).unwrap(), direct, 1e-11));
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let s = c(1.25, 3.75);
        let (z, dz) = zeta_with_deriv(s).unwrap();
        let (zc, dzc) = zeta_with_deriv(s.conj()).unwrap();
        assert!(close(zc, z.conj(), 1e-14));
        assert!(close(dzc, dz.conj(), 1e-14));
    }

    #[test]
    fn domain_is_enforced() {
        assert!(zeta_with_deriv(c(0.1, 5.0)).is_err());
        assert!(zeta_with_deriv(c(1.0, 0.0)).is_err());
        assert!(zeta_log_deriv(c(1.0, 0.0)).is_err());
    }
}
