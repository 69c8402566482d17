use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live in different Hilbert spaces")]
    SpaceMismatch,

    #[error("Gram matrix is not Hermitian (max asymmetry {asymmetry:e}, allowed {allowed:e})")]
    GramNotHermitian { asymmetry: f64, allowed: f64 },

    #[error("Gram matrix is not positive definite (pivot {index} = {pivot:e}, floor {floor:e})")]
    GramNotPositiveDefinite { index: usize, pivot: f64, floor: f64 },

    #[error("subspace is not contained in the target (min principal cosine {min_cosine})")]
    NotASubspaceOf { min_cosine: f64 },

    #[error("zero-dimensional subspace where a nonzero one is required")]
    ZeroSubspace,

    #[error("degenerate inclination (c = {c}): {reason}")]
    DegenerateInclination { c: f64, reason: String },

    #[error("vector is not in L + M (residual {residual:e} exceeds {allowed:e})")]
    NotInSumSpace { residual: f64, allowed: f64 },

    #[error("weight a1 = {0} is outside [0, 1]")]
    BadWeights(f64),

    #[error("functional does not vanish on L ∩ M (restriction norm {restriction:e} exceeds {allowed:e})")]
    NotInFQ { restriction: f64, allowed: f64 },

    #[error("theta[{index}] = {value} must be finite and nonzero")]
    BadTheta { index: usize, value: f64 },

    #[error("configuration too large: {0}")]
    ConfigTooLarge(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("field is not in the zero-trace subspace (off-subspace mass {0:e})")]
    NotInL(f64),

    #[error("field is not in the vortex subspace (distance {0:e})")]
    NotInLHat(f64),

    #[error("field has a term outside the ambient basis: {0}")]
    NotInAmbient(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::GramNotHermitian { .. } => "GramNotHermitian",
            Error::GramNotPositiveDefinite { .. } => "GramNotPositiveDefinite",
            Error::NotASubspaceOf { .. } => "NotASubspaceOf",
            Error::ZeroSubspace => "ZeroSubspace",
            Error::DegenerateInclination { .. } => "DegenerateInclination",
            Error::NotInSumSpace { .. } => "NotInSumSpace",
            Error::BadWeights(_) => "BadWeights",
            Error::NotInFQ { .. } => "NotInFQ",
            Error::BadTheta { .. } => "BadTheta",
            Error::ConfigTooLarge(_) => "ConfigTooLarge",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NotInL(_) => "NotInL",
            Error::NotInLHat(_) => "NotInLHat",
            Error::NotInAmbient(_) => "NotInAmbient",
            Error::Numerical(_) => "Numerical",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
