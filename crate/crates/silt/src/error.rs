//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum SiltError {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical instability at t = {time:.6} s, step {step}: {detail}")]
    Instability { time: f64, step: u64, detail: String },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SiltError>;
