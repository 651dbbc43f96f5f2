use thiserror::Error;

/// Errors surfaced by the geometric operators and the solver.
#[derive(Debug, Error)]
pub enum LpbmError {
    #[error("unsupported dimension {0}, expected 2 or 3")]
    UnsupportedDim(usize),

    #[error("grid resolution {0} below minimum {1}")]
    ResolutionTooSmall(usize, usize),

    #[error("dim-2 grid resolution {0} must be divisible by 4")]
    ResolutionNotDivisible(usize),

    #[error("measure has zero total mass")]
    ZeroTotalMass,

    #[error("measure is not even")]
    NotEven,

    #[error("measure concentrated near a great subsphere (concentration_gap {gap:.3e} below threshold {threshold:.3e})")]
    Concentrated { gap: f64, threshold: f64 },

    #[error("polytope is degenerate (not full-dimensional)")]
    DegenerateBody,

    #[error("origin is not in the interior of the body")]
    OriginNotInterior,

    #[error("origin is outside the body")]
    OriginOutside,

    #[error("linear map is singular")]
    SingularMap,

    #[error("exponent p = {0} outside the supported range (1, 12]")]
    UnsupportedExponent(f64),

    #[error("p = {0} coincides with the dimension; the plain (unnormalized) operators do not exist there")]
    ExponentEqualsDim(f64),

    #[error("body must be origin-symmetric for this operation")]
    NotOriginSymmetric,

    #[error("cut plane does not intersect the interior of the body")]
    CutOutsideBody,

    #[error("facet normals do not match the support of the measure")]
    NormalMismatch,

    #[error("cosine transform vanishes in the requested direction")]
    ZeroTransformValue,

    #[error("operation requires dimension 2")]
    NotPlanar,

    #[error("solver failed to converge: final residual {residual:.3e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, LpbmError>;
