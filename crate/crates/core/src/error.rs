use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `4δ² + (ε₁−ε₂)² = 0`: the exceptional points run off to infinity.
    #[error("degenerate parameters: discriminant coefficient 4δ² + (ε₁−ε₂)² vanishes")]
    DegenerateParameters,

    #[error(
        "defective spectrum: λ is within {distance:.3e} of an exceptional point \
         (tolerance {tolerance:.3e}); use the Jordan-form propagator instead"
    )]
    DefectiveSpectrum { distance: f64, tolerance: f64 },

    #[error("matrix is not defective: eigenvalue gap {gap:.3e} exceeds threshold {threshold:.3e}")]
    NotDefective { gap: f64, threshold: f64 },

    #[error("matrix is a multiple of the identity: a true degeneracy, not an exceptional point")]
    DiagonalDegenerate,

    #[error(
        "nearly defective matrix: minimum eigenvalue gap {gap:.3e} is below {threshold:.3e}; \
         use the Jordan-form propagator instead"
    )]
    NearlyDefective { gap: f64, threshold: f64 },

    #[error("rank condition violated: {0}")]
    Rank(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "branch tracking step too coarse at sample {index}: argument jump exceeds 90°; \
         increase the number of samples"
    )]
    StepTooCoarse { index: usize },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
