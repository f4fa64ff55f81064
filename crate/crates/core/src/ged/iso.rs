//! Detection of zero-cost node alignments.
//!
//! Two graphs admit a zero-cost edit path exactly when some node bijection
//! preserves every concept and maps each ordered endpoint group onto a group
//! with the same predicate multiset. Cheap multiset prechecks reject almost
//! all pairs; survivors get a most-constrained-first backtracking search with
//! a step budget. An exhausted budget is treated as "not found", which keeps
//! the caller's result a valid upper bound.

use std::collections::HashMap;

use crate::ged::bipartite::GraphHandle;
use crate::taxonomy::ConceptId;

const MAX_NODES: usize = 64;
const STEP_BUDGET: u64 = 1_000_000;

type GroupPreds = HashMap<(usize, usize), Vec<ConceptId>>;

fn sorted_group_predicates(h: &GraphHandle) -> GroupPreds {
    h.groups
        .iter()
        .map(|(&key, edges)| {
            let mut preds: Vec<ConceptId> = edges.iter().map(|&e| h.predicates[e]).collect();
            preds.sort_unstable();
            (key, preds)
        })
        .collect()
}

/// Per-node structural signature: concept plus sorted (predicate, neighbor
/// concept) multisets for outgoing and incoming edges.
fn signatures(h: &GraphHandle) -> Vec<(ConceptId, Vec<(ConceptId, ConceptId)>, Vec<(ConceptId, ConceptId)>)> {
    let n = h.n();
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for (e, &(s, d)) in h.endpoints.iter().enumerate() {
        out[s].push((h.predicates[e], h.concepts[d]));
        inc[d].push((h.predicates[e], h.concepts[s]));
    }
    (0..n)
        .map(|i| {
            let mut o = std::mem::take(&mut out[i]);
            let mut r = std::mem::take(&mut inc[i]);
            o.sort_unstable();
            r.sort_unstable();
            (h.concepts[i], o, r)
        })
        .collect()
}

pub(crate) fn zero_cost_alignment_exists(h1: &GraphHandle, h2: &GraphHandle) -> bool {
    let n = h1.n();
    if n != h2.n() || h1.predicates.len() != h2.predicates.len() || n > MAX_NODES {
        return false;
    }
    let mut concepts1 = h1.concepts.clone();
    let mut concepts2 = h2.concepts.clone();
    concepts1.sort_unstable();
    concepts2.sort_unstable();
    if concepts1 != concepts2 {
        return false;
    }
    let triple = |h: &GraphHandle| {
        let mut t: Vec<(ConceptId, ConceptId, ConceptId)> = h
            .endpoints
            .iter()
            .enumerate()
            .map(|(e, &(s, d))| (h.concepts[s], h.predicates[e], h.concepts[d]))
            .collect();
        t.sort_unstable();
        t
    };
    if triple(h1) != triple(h2) {
        return false;
    }

    let sig1 = signatures(h1);
    let sig2 = signatures(h2);
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for s1 in &sig1 {
        let cands: Vec<usize> = (0..n).filter(|&j| sig2[j] == *s1).collect();
        if cands.is_empty() {
            return false;
        }
        candidates.push(cands);
    }

    let groups1 = sorted_group_predicates(h1);
    let groups2 = sorted_group_predicates(h2);

    // Most constrained first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));

    let mut mapping: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let mut budget = STEP_BUDGET;
    extend(
        &order,
        0,
        &candidates,
        &groups1,
        &groups2,
        &mut mapping,
        &mut used,
        &mut budget,
    )
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[usize],
    depth: usize,
    candidates: &[Vec<usize>],
    groups1: &GroupPreds,
    groups2: &GroupPreds,
    mapping: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    budget: &mut u64,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    for &v in &candidates[u] {
        if used[v] {
            continue;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if consistent(u, v, order, depth, groups1, groups2, mapping) {
            mapping[u] = Some(v);
            used[v] = true;
            if extend(order, depth + 1, candidates, groups1, groups2, mapping, used, budget) {
                return true;
            }
            mapping[u] = None;
            used[v] = false;
        }
    }
    false
}

/// Checks that mapping `u -> v` keeps every ordered group involving `u` and
/// an already-mapped node (including `u` itself) predicate-identical, in both
/// graphs and both directions. Empty groups must stay empty on the other side.
fn consistent(
    u: usize,
    v: usize,
    order: &[usize],
    depth: usize,
    groups1: &GroupPreds,
    groups2: &GroupPreds,
    mapping: &[Option<usize>],
) -> bool {
    static EMPTY: &[ConceptId] = &[];
    let preds1 = |key: (usize, usize)| groups1.get(&key).map(|v| v.as_slice()).unwrap_or(EMPTY);
    let preds2 = |key: (usize, usize)| groups2.get(&key).map(|v| v.as_slice()).unwrap_or(EMPTY);
    if preds1((u, u)) != preds2((v, v)) {
        return false;
    }
    for &w in &order[..depth] {
        let x = mapping[w].expect("nodes before depth are mapped");
        if preds1((u, w)) != preds2((v, x)) || preds1((w, u)) != preds2((x, v)) {
            return false;
        }
    }
    true
}
