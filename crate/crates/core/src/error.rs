use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge #{index} ({u}, {v}) has an endpoint outside 0..{n}")]
    EdgeOutOfRange {
        index: usize,
        u: usize,
        v: usize,
        n: usize,
    },

    #[error("vertex {v} is out of range for a digraph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("stub counts differ: in-degrees sum to {in_sum}, out-degrees sum to {out_sum}")]
    StubMismatch { in_sum: u64, out_sum: u64 },

    #[error("invalid degree law: {0}")]
    InvalidLaw(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error(
        "reachability closure refused: condensation has {nodes} nodes, limit is {limit}; \
         use capped estimates (Monte Carlo pair sampling) instead"
    )]
    ClosureTooLarge { nodes: usize, limit: usize },

    #[error("census radius mismatch: {0} vs {1}")]
    RadiusMismatch(u32, u32),

    #[error("edge-list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    IoBare(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
