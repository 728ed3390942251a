//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("graph is not connected")]
    Disconnected,

    #[error("vertex id {id} out of range for graph with {vertices} vertices")]
    VertexOutOfRange { id: u32, vertices: usize },

    #[error("graph has an isolated vertex ({id})")]
    IsolatedVertex { id: u32 },

    #[error("grid dimensions must be at least 2x2 (got {rows}x{cols})")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "transition schedule needs {required} bytes which exceeds the budget of {budget} bytes"
    )]
    MemoryBudget { required: u128, budget: u128 },

    #[error("degenerate posterior: elementwise product is identically zero")]
    DegeneratePosterior,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("training produced a non-finite loss at step {step}")]
    NanLoss { step: usize },

    #[error("training diverged: loss {loss} exceeded {limit} at step {step}")]
    Divergence { loss: f64, limit: f64, step: usize },

    #[error("path generation failed: {0}")]
    Sampling(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model/graph mismatch: {0}")]
    ModelMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
