use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (non-finite, out of range, malformed).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value required to be a U(1) element is not of unit modulus.
    #[error("non-unitary phase factor: |U| = {modulus}")]
    NonUnitary { modulus: f64 },

    /// The geometric-series denominator vanishes.
    #[error("pole: |{what}| = {modulus:e} is below the pole tolerance")]
    Pole { what: &'static str, modulus: f64 },

    /// The loop series does not converge (`beta |U| >= 1`).
    #[error("divergent series: beta*|U| = {ratio}")]
    Divergent { ratio: f64 },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The request exceeds the desk-scale resource cap.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
