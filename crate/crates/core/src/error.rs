use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("empty signal")]
    EmptySignal,

    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("signal must have non-vanishing first and last coefficient")]
    NotFullDegree,

    #[error("eigensolver did not converge (off-diagonal residual {residual:e})")]
    EigNoConvergence { residual: f64 },

    #[error("power iteration did not converge (residual {residual:e})")]
    PowerNoConvergence { residual: f64 },

    #[error("root finder did not converge (worst residual {residual:e})")]
    RootNoConvergence { residual: f64 },

    #[error("a zero at the origin cannot be represented in root form")]
    ZeroRoot,

    #[error("polynomial division left a remainder (relative residual {residual:e})")]
    InexactDivision { residual: f64 },

    #[error("polynomial is not self-reciprocal")]
    NotSelfReciprocal,

    #[error("degree {degree} exceeds the admissible maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("too many zeros for enumeration: {count} > {max}")]
    TooManyZeros { count: usize, max: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("lambda decomposition mismatch (max entry deviation {deviation:e})")]
    CertificateMismatch { deviation: f64 },

    #[error("solver diverged after {iters} iterations (objective trace tail {trace:?})")]
    Divergence { iters: usize, trace: Vec<f64> },
}
