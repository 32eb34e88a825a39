use thiserror::Error;

/// Errors raised by the fault localisation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed validation; `field` names the offending input.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    /// A frequency grid does not have the uniform `pi/(N*T_s)` layout expected.
    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    /// Frequency synthesis would wrap around the end of the record.
    #[error(
        "record of {n_samples} samples is too short for the response (wraparound); \
         at least {required} samples are required"
    )]
    RecordTooShort { n_samples: usize, required: usize },

    /// The time-stepping solver produced values beyond the divergence guard.
    #[error(
        "PDE solver diverged at step {step} (|z| = {magnitude:e}); \
         try more spatial nodes or a different time step"
    )]
    Diverged { step: usize, magnitude: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `value > 0` and finiteness.
pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

/// Checks `value >= 0` and finiteness.
pub(crate) fn require_nonnegative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            field,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}

pub(crate) fn require_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
