use thiserror::Error;

/// Errors raised while validating inputs or running a certification routine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("eigenvalue {value} at index {index} is negative")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("eigenvalues sum to {sum}, not 1")]
    TraceError { sum: f64 },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("the Gurvits-Barnum ball is not available on the symmetric subspace")]
    SymmetricDimsUnsupported,

    #[error("criterion does not apply to these dimensions: {0}")]
    UnsupportedDims(String),

    #[error("hierarchy level {kappa} outside 0..={max}")]
    KappaOutOfRange { kappa: usize, max: usize },

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid subsystem mask: {0}")]
    MaskInvalid(String),

    #[error("reduction map is not invertible at alpha = 0")]
    AlphaZero,

    #[error("dimension {dim} exceeds the supported size {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimsMismatch(String),

    #[error("vertices do not span the trace-one hyperplane")]
    DegenerateInput,

    #[error("{} facets bind on the ordered sector", .0.len())]
    SectorAmbiguous(Vec<crate::polytope::Facet>),

    #[error("iteration budget exhausted with residual {residual:e} still decreasing")]
    IterationBudgetExhausted { residual: f64, iterations: usize },

    #[error("convex set '{0}' is not stable under dephasing")]
    UnstableDescriptor(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Whether the error stems from bad input rather than a failed run.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Inconsistent(_) | Error::IterationBudgetExhausted { .. } | Error::SectorAmbiguous(_) | Error::Io(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
