use std::path::PathBuf;

/// Errors raised by body construction, geometry, and persistence.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error(
        "body is not strictly convex: min(h + h'') = {min:e} at node {node} (theta = {theta:.6})"
    )]
    NotConvex { min: f64, node: usize, theta: f64 },

    #[error("grid of {nodes} nodes is too coarse for degree {degree}")]
    InsufficientNodes { nodes: usize, degree: usize },

    #[error("node count {0} is not a power of two >= 8")]
    BadNodeCount(usize),

    #[error("negative Minkowski discriminant {0:e}")]
    NegativeDiscriminant(f64),

    #[error("linear program failed: {0}")]
    SolverFailure(String),

    #[error("no dilation position found: {0}")]
    Infeasible(String),

    #[error("bodies are not at a dilation position")]
    NotAtDilationPosition,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown functional '{0}'")]
    UnknownFunctional(String),

    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
