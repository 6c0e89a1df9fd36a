use thiserror::Error;

/// Errors raised by the simulation kernels and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("edge ({0}, {1}) has not been revealed")]
    UnknownEdge(usize, usize),

    #[error("edge ({0}, {1}) was revealed twice")]
    EdgeRevisited(usize, usize),

    #[error("instance too large for exhaustive search: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("census cap of {cap} particles exceeded at generation {generation}")]
    CensusCapExceeded { cap: usize, generation: usize },

    #[error("power iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
