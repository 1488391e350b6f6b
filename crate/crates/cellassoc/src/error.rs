use thiserror::Error;

/// Library-wide error type.
///
/// Numerical failures carry the best partial estimate so callers can decide
/// whether an unconverged integral is still usable for diagnostics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// What was violated.
        message: String,
    },

    /// Adaptive quadrature exhausted its subdivision budget before the
    /// requested tolerance was met, or the integrand produced a non-finite
    /// value.
    #[error("quadrature failure in {context}: best estimate {estimate:.9e}, error bound {error_bound:.3e}")]
    Quadrature {
        /// Which integral failed (static description, not user input).
        context: &'static str,
        /// Best available estimate at the time of failure.
        estimate: f64,
        /// Error bound attached to the estimate (infinite if the integrand
        /// was non-finite).
        error_bound: f64,
    },

    /// The requested combination (policy × metric × parameters) has no
    /// implemented closed form or the configuration is outside its domain
    /// of validity.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
