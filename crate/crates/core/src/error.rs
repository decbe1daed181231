use thiserror::Error;

/// Errors raised by the geometry, dynamics and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The evaluation point lies outside the domain of the refractive profile.
    #[error("point {point:?} is outside the profile domain: {reason}")]
    Domain { point: [f64; 3], reason: String },

    /// The requested operation needs a symmetry the profile does not have.
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    /// A parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The adaptive integrator shrank its step below the underflow threshold.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    /// A numerical procedure failed to produce a finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(point: [f64; 3], reason: impl Into<String>) -> Self {
        Error::Domain {
            point,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
