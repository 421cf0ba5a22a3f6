use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported sphere dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("order sigma = {0} must lie in (0, 1)")]
    InvalidOrder(f64),

    #[error("band limit {lmax} exceeds what the grid resolves exactly (max {max})")]
    BandLimitTooLarge { lmax: usize, max: usize },

    #[error("field does not match grid: {0}")]
    GridMismatch(String),

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("functional undefined: {0}")]
    Undefined(String),

    #[error("point lies at the projection pole")]
    AtPole,

    #[error("newton iteration failed after {iterations} iterations (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("forbidden low-degree content: {0}")]
    LowDegreeContent(String),

    #[error("triangulation refinement required: {0}")]
    RefinementRequired(String),

    #[error("invalid critical-point model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
