use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible generation parameters: {0}")]
    Generation(String),

    #[error("failed to parse {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(
        "exact size limit exceeded: {n} circles > exact_limit {limit}; \
         use the cutting-plane or heuristic method instead"
    )]
    ExactSizeLimit { n: usize, limit: usize },

    #[error("node graph too large: {nodes} nodes (k * N) exceeds the limit of {limit}")]
    GraphTooLarge { nodes: usize, limit: usize },

    #[error("contract violation: {0}")]
    Contract(String),
}
