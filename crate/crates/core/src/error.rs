use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the decomposition and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient dimension must be positive")]
    EmptyAmbient,

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("triple is not decomposable: {0}")]
    NotDecomposable(String),

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("point is off the geodesic (residual {residual:e})")]
    OffGeodesic { residual: f64 },

    #[error("distance mismatch: {0} vs {1}")]
    DistMismatch(f64, f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("continuation stalled at s = {s} (step {step:e})")]
    ContinuationStall { s: f64, step: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("parabolic points coincide")]
    EqualPoints,

    #[error("parabolic points are not pairwise distinct")]
    NotDistinct,

    #[error("singular sample point (density {0:e})")]
    SingularPoint(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable upper-case tag, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyAmbient => "EMPTY_AMBIENT",
            Error::AmbientMismatch(..) => "AMBIENT_MISMATCH",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::NotDecomposable(_) => "NOT_DECOMPOSABLE",
            Error::NotUnit(_) => "NOT_UNIT",
            Error::OffGeodesic { .. } => "OFF_GEODESIC",
            Error::DistMismatch(..) => "DIST_MISMATCH",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::NumericalFailure(_) => "NUMERICAL_FAILURE",
            Error::ContinuationStall { .. } => "CONTINUATION_STALL",
            Error::HypothesisViolated(_) => "HYPOTHESIS_VIOLATED",
            Error::EqualPoints => "EQUAL_POINTS",
            Error::NotDistinct => "NOT_DISTINCT",
            Error::SingularPoint(_) => "SINGULAR_POINT",
            Error::Unsupported(_) => "UNSUPPORTED",
        }
    }
}
