//! Exact graph edit distance by depth-first branch and bound.
//!
//! The search enumerates node mappings (each source node maps to an unused
//! target node or is deleted; leftover target nodes are inserted). Edge costs
//! are charged incrementally as soon as both endpoints of an ordered group
//! are decided, using the same optimal group matching as the approximation,
//! so both methods price edits in identical units.
//!
//! The bound below a partial mapping charges every undecided node the
//! cheapest fate it could still have, with substitution costs split half to
//! each side so nothing is counted twice. That keeps the bound admissible
//! and the returned cost a global minimum.

use crate::error::{Error, Result};
use crate::ged::bipartite::{
    approx_ged_inner, path_from_mapping, GraphHandle, MultisetEditCache, NodeMapping,
};
use crate::ged::edit::EditPath;
use crate::graph::SceneGraph;
use crate::taxonomy::{ConceptId, CostModel};

/// Exact GED with a node budget guarding the exponential search.
pub fn exact_ged(
    g1: &SceneGraph,
    g2: &SceneGraph,
    cm: &CostModel,
    node_budget: usize,
) -> Result<(f64, EditPath)> {
    check_budget(g1, g2, node_budget)?;
    let h1 = GraphHandle::new(g1, cm)?;
    let h2 = GraphHandle::new(g2, cm)?;
    exact_ged_inner(&h1, &h2, cm, &MultisetEditCache::new())
}

pub(crate) fn check_budget(g1: &SceneGraph, g2: &SceneGraph, node_budget: usize) -> Result<()> {
    let biggest = g1.nodes.len().max(g2.nodes.len());
    if biggest > node_budget {
        return Err(Error::Size(format!(
            "graph pair has up to {biggest} nodes, above the exact-search budget of {node_budget}; \
             use the approximate method for graphs this large"
        )));
    }
    Ok(())
}

pub(crate) fn exact_ged_inner(
    h1: &GraphHandle,
    h2: &GraphHandle,
    cm: &CostModel,
    cache: &MultisetEditCache,
) -> Result<(f64, EditPath)> {
    // The approximation is a feasible path, so it seeds the incumbent.
    let (approx_cost, _) = approx_ged_inner(h1, h2, cm, cache)?;
    let mut search = Search::new(h1, h2, cm, cache);
    search.best_cost = approx_cost + 1e-9;
    let mut mapping = vec![None; h1.n()];
    let mut used = vec![false; h2.n()];
    search.dfs(0, &mut mapping, &mut used, 0.0);
    let best = search
        .best_mapping
        .expect("search visits at least the mapping behind the incumbent");
    let path = path_from_mapping(h1, h2, &NodeMapping { to2: best }, cm);
    Ok((path.total_cost, path))
}

struct Search<'a> {
    h2: &'a GraphHandle<'a>,
    cm: &'a CostModel,
    cache: &'a MultisetEditCache,
    n1: usize,
    n2: usize,
    sub: Vec<f64>,
    del: Vec<f64>,
    ins: Vec<f64>,
    group_preds1: std::collections::HashMap<(usize, usize), Vec<ConceptId>>,
    group_preds2: std::collections::HashMap<(usize, usize), Vec<ConceptId>>,
    best_cost: f64,
    best_mapping: Option<Vec<Option<usize>>>,
}

impl<'a> Search<'a> {
    fn new(
        h1: &'a GraphHandle<'a>,
        h2: &'a GraphHandle<'a>,
        cm: &'a CostModel,
        cache: &'a MultisetEditCache,
    ) -> Self {
        let n1 = h1.n();
        let n2 = h2.n();
        let mut sub = vec![0.0; n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                sub[i * n2 + j] = cm.substitution_cost_ids(h1.concepts[i], h2.concepts[j]);
            }
        }
        let del = (0..n1).map(|i| cm.deletion_cost_ids(h1.concepts[i])).collect();
        let ins = (0..n2).map(|j| cm.insertion_cost_ids(h2.concepts[j])).collect();
        let sorted_preds = |h: &GraphHandle| {
            h.groups
                .iter()
                .map(|(&key, edges)| {
                    let mut preds: Vec<ConceptId> =
                        edges.iter().map(|&e| h.predicates[e]).collect();
                    preds.sort_unstable();
                    (key, preds)
                })
                .collect()
        };
        Search {
            h2,
            cm,
            cache,
            n1,
            n2,
            sub,
            del,
            ins,
            group_preds1: sorted_preds(h1),
            group_preds2: sorted_preds(h2),
            best_cost: f64::INFINITY,
            best_mapping: None,
        }
    }

    fn sub_cost(&self, i: usize, j: usize) -> f64 {
        self.sub[i * self.n2 + j]
    }

    fn group1(&self, key: (usize, usize)) -> &[ConceptId] {
        self.group_preds1.get(&key).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn group2(&self, key: (usize, usize)) -> &[ConceptId] {
        self.group_preds2.get(&key).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Edge cost newly determined by fixing node `depth`'s fate, covering
    /// every ordered group between `depth` and nodes decided at or before it.
    fn edge_delta(&self, depth: usize, choice: Option<usize>, mapping: &[Option<usize>]) -> f64 {
        let mut cost = 0.0;
        let self_preds = self.group1((depth, depth));
        match choice {
            Some(v) => {
                cost += self.pair_cost(self_preds, self.group2((v, v)));
            }
            None => cost += self.delete_all(self_preds),
        }
        for k in 0..depth {
            let incoming = self.group1((k, depth));
            let outgoing = self.group1((depth, k));
            match (choice, mapping[k]) {
                (Some(v), Some(w)) => {
                    cost += self.pair_cost(incoming, self.group2((w, v)));
                    cost += self.pair_cost(outgoing, self.group2((v, w)));
                }
                _ => {
                    cost += self.delete_all(incoming);
                    cost += self.delete_all(outgoing);
                }
            }
        }
        cost
    }

    fn pair_cost(&self, p: &[ConceptId], q: &[ConceptId]) -> f64 {
        if p.is_empty() && q.is_empty() {
            0.0
        } else {
            self.cache.cost(p, q, self.cm)
        }
    }

    fn delete_all(&self, preds: &[ConceptId]) -> f64 {
        preds.iter().map(|&p| self.cm.deletion_cost_ids(p)).sum()
    }

    /// Admissible node-only bound: every undecided source node pays at least
    /// the cheaper of deletion and half its cheapest substitution, and
    /// symmetrically for unused target nodes.
    fn lower_bound(&self, depth: usize, used: &[bool]) -> f64 {
        let mut bound = 0.0;
        for i in depth..self.n1 {
            let mut best = self.del[i];
            for j in 0..self.n2 {
                if !used[j] {
                    best = best.min(0.5 * self.sub_cost(i, j));
                }
            }
            bound += best;
        }
        for j in 0..self.n2 {
            if used[j] {
                continue;
            }
            let mut best = self.ins[j];
            for i in depth..self.n1 {
                best = best.min(0.5 * self.sub_cost(i, j));
            }
            bound += best;
        }
        bound
    }

    fn leaf_extra(&self, mapping: &[Option<usize>], used: &[bool]) -> f64 {
        let mut extra: f64 = used
            .iter()
            .enumerate()
            .filter(|(_, &u)| !u)
            .map(|(j, _)| self.ins[j])
            .sum();
        let mut pre = vec![false; self.n2];
        for image in mapping.iter().flatten() {
            pre[*image] = true;
        }
        for (&(a, b), edges) in &self.h2.groups {
            if !(pre[a] && pre[b]) {
                extra += edges
                    .iter()
                    .map(|&e| self.cm.insertion_cost_ids(self.h2.predicates[e]))
                    .sum::<f64>();
            }
        }
        extra
    }

    fn dfs(&mut self, depth: usize, mapping: &mut Vec<Option<usize>>, used: &mut Vec<bool>, g: f64) {
        if g + self.lower_bound(depth, used) >= self.best_cost {
            return;
        }
        if depth == self.n1 {
            let total = g + self.leaf_extra(mapping, used);
            if total < self.best_cost {
                self.best_cost = total;
                self.best_mapping = Some(mapping.clone());
            }
            return;
        }
        // Children sorted by immediate cost so good incumbents surface early.
        let mut children: Vec<(f64, usize)> = Vec::with_capacity(self.n2 + 1);
        for v in 0..self.n2 {
            if used[v] {
                continue;
            }
            let delta = self.sub_cost(depth, v) + self.edge_delta(depth, Some(v), mapping);
            children.push((delta, v));
        }
        let delete_delta = self.del[depth] + self.edge_delta(depth, None, mapping);
        children.push((delete_delta, self.n2));
        children.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        for (delta, choice) in children {
            if g + delta >= self.best_cost {
                continue;
            }
            if choice < self.n2 {
                mapping[depth] = Some(choice);
                used[choice] = true;
                self.dfs(depth + 1, mapping, used, g + delta);
                used[choice] = false;
                mapping[depth] = None;
            } else {
                mapping[depth] = None;
                self.dfs(depth + 1, mapping, used, g + delta);
            }
        }
    }
}
