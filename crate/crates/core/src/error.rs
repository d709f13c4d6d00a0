use thiserror::Error;

use crate::model::BasisLabel;

/// Errors produced by model construction, propagation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch {
        expected: [BasisLabel; 4],
        found: [BasisLabel; 4],
    },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("step size underflow at t = {t:e} s")]
    StepUnderflow { t: f64 },

    #[error("pole: detuning {detuning:e} rad/s coincides with auxiliary energy")]
    Pole { detuning: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Precondition(_)
                | Error::BasisMismatch { .. }
                | Error::NotHermitian { .. }
                | Error::NotUnitary { .. }
                | Error::NotNormalized { .. }
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
