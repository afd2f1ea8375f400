use thiserror::Error;

/// Errors raised by the model, the solvers and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("rate exponent {exponent:.3} bits exceeds cap {cap} (duration far below any feasible minimum)")]
    ExponentOverflow { exponent: f64, cap: f64 },

    #[error("amplifier input {input} W outside [0, {max}] W")]
    AmplifierDomain { input: f64, max: f64 },

    #[error("rate target cannot be met: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("channel dump: {0}")]
    ChannelDump(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
