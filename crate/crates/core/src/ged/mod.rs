//! Graph edit distance: exact search, bipartite approximation, and the edit
//! paths both of them produce.

mod bipartite;
mod edit;
mod exact;
#[cfg(test)]
mod exact_tests;
mod iso;
mod lap;
mod pairwise;

pub use bipartite::{approx_ged, build_bipartite_cost_matrix};
pub use edit::{verify_replay, EditKind, EditOp, EditPath, EditTarget, Element};
pub use exact::exact_ged;
pub use lap::{solve_lap, CostMatrix, LapSolution, LARGE};
pub use pairwise::{pairwise_ged_matrix, GedMethod, PairwiseOptions};
