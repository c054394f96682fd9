use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Variants map onto the CLI's exit codes: everything except
/// [`Error::NonFinite`] is a validation problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("invalid input: {0}")]
    Input(&'static str),
    #[error("step size {dt} too large for mode frequency ω = {omega} (limit {limit})")]
    StepSize { dt: f64, omega: f64, limit: f64 },
    #[error("action calibration impossible: all mode amplitudes are zero")]
    CalibrationImpossible,
    #[error("calibrated amplitudes {peak} exceed the linearization budget {h_max}")]
    BudgetExceeded { peak: f64, h_max: f64 },
    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,
    #[error("normalization failed: weighted norm is {0}")]
    Normalization(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: &'static str) -> Error {
    Error::Parameter { name, reason }
}
