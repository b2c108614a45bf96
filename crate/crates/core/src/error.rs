use thiserror::Error;

/// Failure modes of the numerical pipeline.
///
/// Every fallible routine distinguishes between configuration that exceeds a
/// stated budget ([`Error::Capacity`]), input outside the validated domain of
/// an algorithm ([`Error::Domain`]), precomputed tables that do not cover a
/// request ([`Error::Coverage`]), and genuine numerical failure of the
/// adaptive quadrature ([`Error::QuadratureDiverged`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded for {what}: requested {requested}, budget {budget}")]
    Capacity {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("table coverage too small: need {needed}, have {available}")]
    Coverage { needed: u64, available: u64 },

    /// The curve is singular modulo `p` although `p` is not the stated
    /// conductor, so no local data can be attached there.
    #[error("unexpected bad reduction at p = {p}")]
    BadReduction { p: u64 },

    #[error(
        "quadrature did not converge: half-width {half_width}, \
         tail estimate {tail:.3e}, target {target:.3e}"
    )]
    QuadratureDiverged {
        half_width: f64,
        tail: f64,
        target: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }
}
