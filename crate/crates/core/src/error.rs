use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wave functions live on different grids")]
    GridMismatch,

    #[error("amplitude count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state is null (weight {weight:.3e})")]
    NullState { weight: f64 },

    #[error("null state produced at plan step {step} (weight {weight:.3e})")]
    NullStep { step: usize, weight: f64 },

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("grid support exceeded: {0}")]
    Support(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Fock truncation too small: {0}")]
    Truncation(String),

    #[error("sweep region too small: captured fraction {captured:.6} of the outcome mass")]
    RegionTooSmall { captured: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures that come from numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NullState { .. }
                | Error::NullStep { .. }
                | Error::Aliasing(_)
                | Error::RegionTooSmall { .. }
        )
    }
}
