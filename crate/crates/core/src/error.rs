use thiserror::Error;

/// Everything that can go wrong while building or checking a loop.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is singular (smallest singular value {min_singular:.3e})")]
    Singular { min_singular: f64 },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("winding {winding} too small for eigenphase {lambda}: (n*pi)^2 < lambda^2")]
    WindingTooSmall { winding: u32, lambda: f64 },

    #[error("eigenvector index {index} out of range for a {dim}-dimensional gate")]
    EigvecOutOfRange { index: usize, dim: usize },

    #[error("expected {expected} winding numbers, got {found}")]
    WindingCount { expected: usize, found: usize },

    #[error("time resolution too low: {steps} steps for T = {total_time} (need at least {required})")]
    ResolutionTooLow { steps: usize, total_time: f64, required: usize },

    #[error("qubit {qubit} out of range for an array of {n_main} main qubits")]
    QubitOutOfRange { qubit: usize, n_main: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerical kernel itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Singular { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
