use thiserror::Error;

/// Errors surfaced by grid construction, checkers, builders, and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimension must be 1, 2, or 3 (got {0})")]
    BadDimension(usize),

    #[error("nodes per axis must be odd and at least 3 (got {0})")]
    BadNodesPerAxis(usize),

    #[error("truncation radius must be positive (got {0})")]
    BadRadius(f64),

    #[error("non-finite sample value at ({coords:?})")]
    NonFiniteSample { coords: Vec<f64> },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("nehari projection undefined: {0}")]
    ProjectionUndefined(String),

    #[error("center search failed: {0}")]
    CenterSearch(String),

    #[error("bump supports overlap (terms {0} and {1})")]
    OverlappingSupports(usize, usize),

    #[error("weight function `{0}` does not vanish at infinity on the sampled radii")]
    NotVanishing(String),

    #[error("solver failed: {0}")]
    Solver(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
