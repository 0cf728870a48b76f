//! Score-based causal discovery over Markov equivalence classes.
//!
//! Learns a CPDAG from continuous observational data by greedy search over
//! equivalence classes under a Gaussian BIC score. Provides GES (with optional
//! reversal phase and the OPS variant), XGES-0 and XGES, an incremental
//! operator cache, a linear-Gaussian simulator, and evaluation metrics.

pub mod cli;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod nodeset;
pub mod operators;
pub mod scoring;
pub mod search;
pub mod simulate;

pub type NodeId = usize;

pub use error::{Error, Result};
pub use graph::{Dag, EdgeChange, EdgeKind, Pdag};
pub use nodeset::NodeSet;
pub use operators::{DeleteOp, InsertOp, Operator, ReverseOp};
pub use scoring::{DataSet, Scorer};
pub use search::{ges, xges, xges0, SearchOptions, SearchResult};
