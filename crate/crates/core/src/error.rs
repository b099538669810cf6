use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("unconnectable parameters: no connected graph with n={n}, p={p} after {attempts} attempts")]
    Unconnectable { n: usize, p: f64, attempts: usize },

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("duplicate vertex {0}")]
    DuplicateVertex(usize),

    #[error("invalid budget: {0}")]
    InvalidBudget(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state diverged at t = {time}")]
    Diverged { time: f64 },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("no attack scenario could be solved for monitor set {0}")]
    NoFeasibleScenario(String),

    #[error("bundled data is corrupt: {0}")]
    CorruptData(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
