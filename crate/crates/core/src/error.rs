use thiserror::Error;

use crate::graph::EdgeChange;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge change {0:?} does not match the current graph")]
    ChangeMismatch(EdgeChange),
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("graph admits no consistent extension")]
    NoExtension,
    #[error("operator is not valid for the current graph")]
    InvalidOperator,
    #[error("completion changed the skeleton between {0} and {1}")]
    SkeletonChanged(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
