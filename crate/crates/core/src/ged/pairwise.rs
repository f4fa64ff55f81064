//! All-pairs GED matrices over a dataset.

use rayon::prelude::*;

use crate::error::Result;
use crate::ged::bipartite::{approx_ged_inner, GraphHandle, MultisetEditCache};
use crate::ged::exact::{check_budget, exact_ged_inner};
use crate::graph::LabeledDataset;
use crate::matrix::IdMatrix;
use crate::taxonomy::CostModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GedMethod {
    Exact,
    Approx,
}

impl GedMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            GedMethod::Exact => "exact",
            GedMethod::Approx => "approx",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PairwiseOptions {
    pub method: GedMethod,
    pub node_budget: usize,
    /// Compute both triangles independently instead of mirroring the upper
    /// one; useful for probing the approximation's asymmetry.
    pub directional: bool,
}

impl Default for PairwiseOptions {
    fn default() -> Self {
        PairwiseOptions {
            method: GedMethod::Approx,
            node_budget: 10,
            directional: false,
        }
    }
}

/// Pairwise GED matrix in dataset order, zero diagonal, upper triangle
/// computed in parallel and mirrored unless `directional` is set.
pub fn pairwise_ged_matrix(
    ds: &LabeledDataset,
    cm: &CostModel,
    options: &PairwiseOptions,
) -> Result<IdMatrix> {
    let handles: Vec<GraphHandle> = ds
        .graphs
        .iter()
        .map(|g| GraphHandle::new(g, cm))
        .collect::<Result<_>>()?;
    let cache = MultisetEditCache::new();
    let n = handles.len();
    let mut pairs = Vec::new();
    for r in 0..n {
        for c in (r + 1)..n {
            pairs.push((r, c));
            if options.directional {
                pairs.push((c, r));
            }
        }
    }
    let entries: Vec<((usize, usize), f64)> = pairs
        .par_iter()
        .map(|&(r, c)| {
            let value = match options.method {
                GedMethod::Approx => {
                    approx_ged_inner(&handles[r], &handles[c], cm, &cache).map(|(cost, _)| cost)
                }
                GedMethod::Exact => check_budget(&ds.graphs[r], &ds.graphs[c], options.node_budget)
                    .and_then(|()| exact_ged_inner(&handles[r], &handles[c], cm, &cache))
                    .map(|(cost, _)| cost),
            };
            value
                .map(|v| ((r, c), v))
                .map_err(|e| e.with_context(&format!("pair ({}, {})", ds.graphs[r].id, ds.graphs[c].id)))
        })
        .collect::<Result<_>>()?;

    let mut matrix = IdMatrix::zeros(ds.graph_ids());
    for ((r, c), value) in entries {
        matrix.set(r, c, value);
        if !options.directional {
            matrix.set(c, r, value);
        }
    }
    Ok(matrix)
}
