//! Numerical laboratory for the low-lying zero statistics of quadratic twists
//! of a fixed prime-conductor elliptic curve.
//!
//! The crate evaluates, at desk scale, both sides of the comparison between
//! the arithmetic (explicit-formula) computation of the averaged one-level
//! density over a family of real quadratic twists and the closed-form
//! prediction assembled from averaged ratios of twisted L-functions.  Every
//! quantity is computed two independent ways wherever the mathematics allows
//! it: direct prime sums against exact family character data on one side,
//! analytic continuations and Euler products on the other.
//!
//! Modules:
//! - [`arith`]: integer substrate (sieves, Kronecker symbol, fundamental
//!   discriminants, the twist family and its character statistics),
//! - [`curve`]: the reference curve, point counts, Hecke eigenvalue tables,
//! - [`special`]: zeta, digamma, log-gamma, and the symmetric-square data,
//! - [`testfn`]: band-limited test functions and the tail-extrapolated
//!   quadrature used for all principal-value integrals,
//! - [`density`]: the arithmetic one-level density, term by term,
//! - [`ratios`]: the averaged-ratio prediction, its Euler products, and the
//!   oscillatory term,
//! - [`charsum`]: quadratic character sum bounds over the restricted family.

pub mod arith;
pub mod charsum;
pub mod curve;
pub mod density;
pub mod error;
pub mod ratios;
pub mod special;
pub mod testfn;
pub(crate) mod util;

pub use error::{Error, Result};
pub use num_complex::Complex64;
