use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("loss is not differentiable at pi = {0}")]
    NonDifferentiable(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value at time index {time_index}, space index {space_index}")]
    NonFinite { time_index: usize, space_index: usize },

    #[error("no interior solution: {0}")]
    NoInteriorSolution(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("mismatched grids: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
