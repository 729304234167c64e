use thiserror::Error;

/// Errors raised by the model, solver and engine layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A user-facing parameter is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A structural hypothesis on the isotherms does not hold where it is needed.
    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis { hypothesis: &'static str, detail: String },

    /// The operation was called outside its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature failed to converge on [{a}, {b}] (estimated error {error:e})")]
    Quadrature { a: f64, b: f64, error: f64 },

    /// An internal postcondition failed; the computation cannot continue.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    /// The front-tracking event budget was exhausted.
    #[error("max-events exceeded ({0} events)")]
    EventCap(usize),

    /// A query point lies outside the computed domain.
    #[error("point outside computed domain: {0}")]
    Domain(String),

    /// The finite-volume run broke its CFL bound.
    #[error("CFL violation: {0}")]
    Cfl(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by bad input rather than by a numerical abort.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Hypothesis { .. } | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
