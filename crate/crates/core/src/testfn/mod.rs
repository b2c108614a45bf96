//! Band-limited test functions.
//!
//! Both windows have Fourier transform supported in `[-sigma, sigma]` with
//! `hat g(0) = 1`, hence `g(0) = sigma` and unit mass.  All evaluations
//! extend to complex arguments; the removable singularities of the cosine
//! window are patched with series forms selected by proximity, so the
//! entire extension is accurate everywhere the pipeline asks for it.

pub mod quad;

pub use quad::{integrate_symmetric, QuadSpec, Quadrature};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// `sin(w)/w`, complex-safe through `w = 0`.
fn sinc(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        let w2 = w * w;
        1.0 - w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sin() / w
    }
}

/// The two windows used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    /// `hat g` is the triangle on `[-sigma, sigma]`;
    /// `g(tau) = sigma sinc^2(pi sigma tau)`.
    Fejer { sigma: f64 },
    /// `hat g(xi) = cos^2(pi xi / (2 sigma))` on `[-sigma, sigma]`;
    /// `g(tau) = sin(2 pi sigma tau) / (2 pi tau (1 - 4 sigma^2 tau^2))`.
    Cosine { sigma: f64 },
}

impl TestFunction {
    pub fn fejer(sigma: f64) -> Result<TestFunction> {
        check_sigma(sigma)?;
        Ok(TestFunction::Fejer { sigma })
    }

    pub fn cosine(sigma: f64) -> Result<TestFunction> {
        check_sigma(sigma)?;
        Ok(TestFunction::Cosine { sigma })
    }

    /// Half-width of the Fourier support.
    pub fn sigma(&self) -> f64 {
        match *self {
            TestFunction::Fejer { sigma } | TestFunction::Cosine { sigma } => sigma,
        }
    }

    /// `g(0) = sigma` for both windows.
    pub fn value_at_zero(&self) -> f64 {
        self.sigma()
    }

    /// Fourier transform `hat g(xi) = int g(tau) e^{-2 pi i xi tau} d tau`.
    pub fn hat(&self, xi: f64) -> f64 {
        let sigma = self.sigma();
        let a = xi.abs();
        if a >= sigma {
            return 0.0;
        }
        match *self {
            TestFunction::Fejer { .. } => 1.0 - a / sigma,
            TestFunction::Cosine { .. } => {
                let c = (PI * xi / (2.0 * sigma)).cos();
                c * c
            }
        }
    }

    /// `g` on the real axis.
    pub fn eval(&self, tau: f64) -> f64 {
        self.eval_analytic(Complex64::new(tau, 0.0)).re
    }

    /// The entire extension of `g`.
    pub fn eval_analytic(&self, z: Complex64) -> Complex64 {
        // both windows are even
        let z = if z.re < 0.0 { -z } else { z };
        let sigma = self.sigma();
        match *self {
            TestFunction::Fejer { .. } => {
                let s = sinc(PI * sigma * z);
                sigma * s * s
            }
            TestFunction::Cosine { .. } => {
                let half = 1.0 / (2.0 * sigma);
                let quarter = 1.0 / (8.0 * sigma);
                if (z - half).norm() < quarter {
                    // around the removable point tau = 1/(2 sigma)
                    let w = z - half;
                    sinc(2.0 * PI * sigma * w) / (2.0 * z * (1.0 + 2.0 * sigma * z))
                } else if z.norm() < quarter {
                    sigma * sinc(2.0 * PI * sigma * z) / (1.0 - 4.0 * sigma * sigma * z * z)
                } else {
                    (2.0 * PI * sigma * z).sin()
                        / (2.0 * PI * z * (1.0 - 4.0 * sigma * sigma * z * z))
                }
            }
        }
    }

    /// Transform of the dilated function `g_a(tau) = g(|a| tau)`, i.e.
    /// `hat g(xi / |a|) / |a|`.
    pub fn hat_scaled(&self, scale: f64, xi: f64) -> Result<f64> {
        let a = scale_abs(scale)?;
        Ok(self.hat(xi / a) / a)
    }

    /// The dilated function itself.
    pub fn eval_scaled(&self, scale: f64, tau: f64) -> Result<f64> {
        let a = scale_abs(scale)?;
        Ok(self.eval(a * tau))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(
            "test function",
            format!("support half-width {sigma} must be positive and finite"),
        ));
    }
    Ok(())
}

fn scale_abs(scale: f64) -> Result<f64> {
    let a = scale.abs();
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(
            "test function",
            format!("dilation {scale} must be nonzero and finite"),
        ));
    }
    Ok(a)
}
