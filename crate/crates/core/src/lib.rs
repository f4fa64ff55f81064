//! Knowledge-grounded graph edit distance and counterfactual retrieval over
//! labeled scene graphs.
//!
//! The crate covers the full pipeline: scene-graph ingestion and density
//! splits, taxonomy-derived edit costs, exact and assignment-approximated
//! GED with concrete edit paths, graph-kernel and embedding retrieval
//! backends, class-constrained counterfactual retrieval, and the ranking
//! metrics used to score backends against the GED ground truth.

pub mod error;
pub mod ged;
pub mod graph;
pub mod matrix;
pub mod taxonomy;

pub use error::{Error, Result};
