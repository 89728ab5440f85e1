use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("quadrature budget of {budget} evaluations exhausted (error estimate {error:e}, target {target:e})")]
    Budget { budget: usize, error: f64, target: f64 },

    #[error("achieved error {achieved:e} exceeds requested tolerance {target:e}")]
    Tolerance { achieved: f64, target: f64 },

    #[error("non-finite integrand value at {at}")]
    NonFinite { at: f64 },

    #[error("design matrix condition number {0:e} exceeds limit")]
    IllConditioned(f64),

    #[error("profile error: {0}")]
    Profile(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("not supported: {0}")]
    OutOfScope(String),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. }
                | Error::Tolerance { .. }
                | Error::NonFinite { .. }
                | Error::IllConditioned(_)
                | Error::Calibration(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
