use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
///
/// Input and parameter problems are distinguished from numerical failures so
/// callers (the CLI in particular) can map them onto different exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("point set is not unisolvent for order {theta} (rank {rank} < {required})")]
    NotUnisolvent {
        theta: usize,
        rank: usize,
        required: usize,
    },
    #[error("linear solve failed: relative residual {residual:e}")]
    Solve { residual: f64 },
    #[error("coefficient constraint violated: |P^T v| = {violation:e}")]
    Constraint { violation: f64 },
    #[error("search failed after {iterations} iterations: non-finite error at rho = {rho:e}")]
    Search {
        iterations: usize,
        rho: f64,
        /// Every `(rho, error)` pair evaluated before the failure.
        trace: Vec<(f64, f64)>,
    },
}

impl Error {
    /// True for errors caused by bad user input rather than numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Input(_) | Error::Shape { .. } | Error::NotUnisolvent { .. }
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
