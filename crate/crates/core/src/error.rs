use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Jacobi matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid spectral weights: {0}")]
    InvalidWeights(String),

    #[error("eigensolver failed to converge for eigenvalue {index}")]
    SolverFailure { index: usize },

    #[error("eigenvalues {index} and {} are numerically degenerate (gap {gap:e})", index + 1)]
    NearDegenerate { index: usize, gap: f64 },

    #[error("inverse reconstruction broke down at step {step}: {reason}")]
    Reconstruction { step: usize, reason: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("perfect state transfer is undecidable at relative tolerance {tol:e}")]
    PstUndecidable { tol: f64 },

    #[error("amplitude is not Chebyshev-representable: {0}")]
    NotChebyshevRepresentable(String),

    #[error("domain error: {0}")]
    Domain(String),
}
