use thiserror::Error;

/// Errors shared by all toolkit modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("basis is linearly dependent: rank {rank} < {expected}")]
    DependentBasis { rank: usize, expected: usize },

    #[error("tensor is not in the image of the skew-symmetrisation map (residual {residual:.3e} > tol {tol:.3e})")]
    NotInImage { residual: f64, tol: f64 },

    #[error("structure has torsion: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    TorsionPresent { residual: f64, tol: f64 },

    #[error("connection verification failed: closure defect {defect:.3e} exceeds {tol:.3e}")]
    VerificationFailed { defect: f64, tol: f64 },

    #[error("jet data incomplete: missing partial {0}")]
    IncompleteJet(String),

    #[error("seed violates the order-0 equations {equations:?} (residuals {residuals:?})")]
    InconsistentSeed {
        equations: Vec<usize>,
        residuals: Vec<f64>,
    },

    #[error("prolongation stalled at degree {degree}: residual {residual:.3e} > tol {tol:.3e}")]
    ProlongationStalled {
        degree: usize,
        residual: f64,
        tol: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
