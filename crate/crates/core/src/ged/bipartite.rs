//! Bipartite-assignment approximation of graph edit distance.
//!
//! Nodes of both graphs are matched by one linear assignment over an
//! `(n1+n2) x (n1+n2)` cost matrix whose substitution cells carry half the
//! optimal edit cost between the nodes' incident edge-label multisets. The
//! assignment induces a concrete edit path; the path's cost (full edge
//! charges) is the returned value and is an upper bound on the exact
//! distance, since the path is feasible.

use std::collections::HashMap;

use dashmap::DashMap;

use crate::error::Result;
use crate::ged::edit::{EditKind, EditOp, EditPath, EditTarget, Element};
use crate::ged::lap::{solve_lap, CostMatrix, LARGE};
use crate::graph::SceneGraph;
use crate::taxonomy::{ConceptId, CostModel};

/// A scene graph with every label resolved against the taxonomy, plus the
/// derived structures the edit-distance algorithms need.
pub(crate) struct GraphHandle<'a> {
    pub g: &'a SceneGraph,
    pub concepts: Vec<ConceptId>,
    pub predicates: Vec<ConceptId>,
    /// Per node, the sorted multiset of incident edge predicates (out + in;
    /// self-loops contribute twice).
    pub incident: Vec<Vec<ConceptId>>,
    /// Edge indices grouped by ordered endpoint pair.
    pub groups: HashMap<(usize, usize), Vec<usize>>,
    /// Edge endpoints as node indices.
    pub endpoints: Vec<(usize, usize)>,
}

impl<'a> GraphHandle<'a> {
    pub fn new(g: &'a SceneGraph, cm: &CostModel) -> Result<Self> {
        let taxonomy = cm.taxonomy();
        let mut concepts = Vec::with_capacity(g.nodes.len());
        for node in &g.nodes {
            concepts.push(taxonomy.resolve(&node.concept)?);
        }
        let index: HashMap<&str, usize> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let mut predicates = Vec::with_capacity(g.edges.len());
        let mut incident = vec![Vec::new(); g.nodes.len()];
        let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut endpoints = Vec::with_capacity(g.edges.len());
        for (e, edge) in g.edges.iter().enumerate() {
            let p = taxonomy.resolve(&edge.predicate)?;
            predicates.push(p);
            let s = index[edge.src.as_str()];
            let d = index[edge.dst.as_str()];
            incident[s].push(p);
            incident[d].push(p);
            groups.entry((s, d)).or_default().push(e);
            endpoints.push((s, d));
        }
        for multiset in &mut incident {
            multiset.sort_unstable();
        }
        Ok(GraphHandle {
            g,
            concepts,
            predicates,
            incident,
            groups,
            endpoints,
        })
    }

    pub fn n(&self) -> usize {
        self.concepts.len()
    }
}

/// Memo for optimal label-multiset edit costs, shared across the pairs of a
/// matrix run. Keys are canonically ordered, which is safe because
/// substitution is symmetric and deletion equals insertion.
pub(crate) struct MultisetEditCache {
    map: DashMap<(Box<[ConceptId]>, Box<[ConceptId]>), f64>,
}

impl MultisetEditCache {
    pub fn new() -> Self {
        MultisetEditCache {
            map: DashMap::new(),
        }
    }

    pub fn cost(&self, p: &[ConceptId], q: &[ConceptId], cm: &CostModel) -> f64 {
        if p.is_empty() && q.is_empty() {
            return 0.0;
        }
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        let key = (
            a.to_vec().into_boxed_slice(),
            b.to_vec().into_boxed_slice(),
        );
        if let Some(hit) = self.map.get(&key) {
            return *hit;
        }
        let cost = multiset_edit_plan(a, b, cm).0;
        self.map.insert(key, cost);
        cost
    }
}

/// One element-level decision in a multiset edit, as positions into the two
/// input slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PlanStep {
    Sub(usize, usize),
    Del(usize),
    Ins(usize),
}

/// Minimum-cost edit between two label multisets, solved as an assignment
/// over the standard `(a+b) x (a+b)` matrix after matching equal labels
/// greedily. The greedy step is exact here: substitution is a metric and
/// deletion equals substitution against the root, so an optimal solution
/// always exists that pairs equal labels first.
pub(crate) fn multiset_edit_plan(
    p: &[ConceptId],
    q: &[ConceptId],
    cm: &CostModel,
) -> (f64, Vec<PlanStep>) {
    let mut steps = Vec::new();
    let mut q_used = vec![false; q.len()];
    let mut p_rest = Vec::new();
    for (i, &label) in p.iter().enumerate() {
        let slot = q
            .iter()
            .enumerate()
            .find(|&(j, &other)| !q_used[j] && other == label)
            .map(|(j, _)| j);
        match slot {
            Some(j) => {
                q_used[j] = true;
                steps.push(PlanStep::Sub(i, j));
            }
            None => p_rest.push(i),
        }
    }
    let q_rest: Vec<usize> = (0..q.len()).filter(|&j| !q_used[j]).collect();

    let a = p_rest.len();
    let b = q_rest.len();
    let mut total = 0.0;
    if a + b > 0 {
        let mut matrix = CostMatrix::zeros(a + b);
        for (r, &i) in p_rest.iter().enumerate() {
            for (c, &j) in q_rest.iter().enumerate() {
                matrix.set(r, c, cm.substitution_cost_ids(p[i], q[j]));
            }
            for k in 0..a {
                matrix.set(
                    r,
                    b + k,
                    if k == r { cm.deletion_cost_ids(p[i]) } else { LARGE },
                );
            }
        }
        for k in 0..b {
            for (c, &j) in q_rest.iter().enumerate() {
                matrix.set(
                    a + k,
                    c,
                    if k == c { cm.insertion_cost_ids(q[j]) } else { LARGE },
                );
            }
        }
        let solution = solve_lap(&matrix).expect("multiset edit matrix is square and finite");
        for (r, &c) in solution.assignment.iter().enumerate() {
            match (r < a, c < b) {
                (true, true) => steps.push(PlanStep::Sub(p_rest[r], q_rest[c])),
                (true, false) => steps.push(PlanStep::Del(p_rest[r])),
                (false, true) => steps.push(PlanStep::Ins(q_rest[c])),
                (false, false) => {}
            }
        }
        total = solution.total;
    }
    (total, steps)
}

/// Builds the `(n1+n2) x (n1+n2)` assignment matrix: substitution block with
/// half-weighted incident-edge terms, deletion/insertion diagonals, and a
/// zero block for epsilon-to-epsilon cells.
pub(crate) fn bipartite_matrix(
    h1: &GraphHandle,
    h2: &GraphHandle,
    cm: &CostModel,
    cache: &MultisetEditCache,
) -> CostMatrix {
    let n1 = h1.n();
    let n2 = h2.n();
    let mut matrix = CostMatrix::zeros(n1 + n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let node_cost = cm.substitution_cost_ids(h1.concepts[i], h2.concepts[j]);
            let edge_cost = cache.cost(&h1.incident[i], &h2.incident[j], cm);
            matrix.set(i, j, node_cost + 0.5 * edge_cost);
        }
        for k in 0..n1 {
            let value = if k == i {
                let edge_cost: f64 = h1.incident[i]
                    .iter()
                    .map(|&p| cm.deletion_cost_ids(p))
                    .sum();
                cm.deletion_cost_ids(h1.concepts[i]) + 0.5 * edge_cost
            } else {
                LARGE
            };
            matrix.set(i, n2 + k, value);
        }
    }
    for k in 0..n2 {
        for j in 0..n2 {
            let value = if k == j {
                let edge_cost: f64 = h2.incident[j]
                    .iter()
                    .map(|&p| cm.insertion_cost_ids(p))
                    .sum();
                cm.insertion_cost_ids(h2.concepts[j]) + 0.5 * edge_cost
            } else {
                LARGE
            };
            matrix.set(n1 + k, j, value);
        }
    }
    matrix
}

/// Public form of the matrix construction.
pub fn build_bipartite_cost_matrix(
    g1: &SceneGraph,
    g2: &SceneGraph,
    cm: &CostModel,
) -> Result<CostMatrix> {
    let h1 = GraphHandle::new(g1, cm)?;
    let h2 = GraphHandle::new(g2, cm)?;
    Ok(bipartite_matrix(&h1, &h2, cm, &MultisetEditCache::new()))
}

/// Node mapping extracted from an assignment: `to2[i]` is the image of g1
/// node `i`, `None` for deletion.
#[derive(Debug, Clone)]
pub(crate) struct NodeMapping {
    pub to2: Vec<Option<usize>>,
}

impl NodeMapping {
    pub fn preimages(&self, n2: usize) -> Vec<Option<usize>> {
        let mut pre = vec![None; n2];
        for (i, image) in self.to2.iter().enumerate() {
            if let Some(j) = *image {
                pre[j] = Some(i);
            }
        }
        pre
    }
}

/// Approximate GED: assignment-induced edit path plus its cost.
pub fn approx_ged(g1: &SceneGraph, g2: &SceneGraph, cm: &CostModel) -> Result<(f64, EditPath)> {
    let h1 = GraphHandle::new(g1, cm)?;
    let h2 = GraphHandle::new(g2, cm)?;
    approx_ged_inner(&h1, &h2, cm, &MultisetEditCache::new())
}

pub(crate) fn approx_ged_inner(
    h1: &GraphHandle,
    h2: &GraphHandle,
    cm: &CostModel,
    cache: &MultisetEditCache,
) -> Result<(f64, EditPath)> {
    // Graphs identical up to node reordering need no edits at all; the
    // assignment heuristic cannot see past one-hop structure and may miss
    // this, so detect it directly.
    if crate::ged::iso::zero_cost_alignment_exists(h1, h2) {
        return Ok((0.0, EditPath::empty()));
    }
    let matrix = bipartite_matrix(h1, h2, cm, cache);
    let solution = solve_lap(&matrix)?;
    let n1 = h1.n();
    let n2 = h2.n();
    let to2: Vec<Option<usize>> = (0..n1)
        .map(|i| {
            let j = solution.assignment[i];
            if j < n2 {
                Some(j)
            } else {
                None
            }
        })
        .collect();
    let path = path_from_mapping(h1, h2, &NodeMapping { to2 }, cm);
    Ok((path.total_cost, path))
}

/// Expands a node mapping into a full edit path. Edge edits within each
/// ordered endpoint group are matched optimally; every group with both
/// endpoints mapped is compared, groups losing an endpoint are deleted, and
/// target groups without a mapped pre-image pair are inserted.
pub(crate) fn path_from_mapping(
    h1: &GraphHandle,
    h2: &GraphHandle,
    mapping: &NodeMapping,
    cm: &CostModel,
) -> EditPath {
    let pre = mapping.preimages(h2.n());
    let mut edge_replaces = Vec::new();
    let mut edge_deletes = Vec::new();
    let mut edge_inserts = Vec::new();

    // Ordered endpoint pairs to reconcile: all source groups, plus target
    // groups whose endpoints both have pre-images.
    let mut pair_keys: Vec<(usize, usize)> = h1.groups.keys().copied().collect();
    for (&(a2, b2), _) in &h2.groups {
        if let (Some(a1), Some(b1)) = (pre[a2], pre[b2]) {
            if !h1.groups.contains_key(&(a1, b1)) {
                pair_keys.push((a1, b1));
            }
        }
    }
    pair_keys.sort_unstable();
    pair_keys.dedup();

    for (a1, b1) in pair_keys {
        let g1_edges: &[usize] = h1
            .groups
            .get(&(a1, b1))
            .map(|v| v.as_slice())
            .unwrap_or(&[]);
        match (mapping.to2[a1], mapping.to2[b1]) {
            (Some(a2), Some(b2)) => {
                let g2_edges: &[usize] = h2
                    .groups
                    .get(&(a2, b2))
                    .map(|v| v.as_slice())
                    .unwrap_or(&[]);
                let preds1: Vec<ConceptId> = g1_edges.iter().map(|&e| h1.predicates[e]).collect();
                let preds2: Vec<ConceptId> = g2_edges.iter().map(|&e| h2.predicates[e]).collect();
                let (_, steps) = multiset_edit_plan(&preds1, &preds2, cm);
                for step in steps {
                    match step {
                        PlanStep::Sub(i, j) => {
                            let e1 = g1_edges[i];
                            let e2 = g2_edges[j];
                            if h1.predicates[e1] != h2.predicates[e2] {
                                edge_replaces.push((e1, replace_edge_op(h1, e1, h2, e2, cm)));
                            }
                        }
                        PlanStep::Del(i) => {
                            let e1 = g1_edges[i];
                            edge_deletes.push((e1, delete_edge_op(h1, e1, cm)));
                        }
                        PlanStep::Ins(j) => {
                            let e2 = g2_edges[j];
                            edge_inserts.push((e2, insert_edge_op(h2, e2, cm)));
                        }
                    }
                }
            }
            _ => {
                for &e1 in g1_edges {
                    edge_deletes.push((e1, delete_edge_op(h1, e1, cm)));
                }
            }
        }
    }
    // Target groups with an unmapped endpoint are pure insertions.
    let mut inserted_groups: Vec<(usize, usize)> = h2
        .groups
        .keys()
        .copied()
        .filter(|&(a2, b2)| pre[a2].is_none() || pre[b2].is_none())
        .collect();
    inserted_groups.sort_unstable();
    for key in inserted_groups {
        for &e2 in &h2.groups[&key] {
            edge_inserts.push((e2, insert_edge_op(h2, e2, cm)));
        }
    }

    let mut node_replaces = Vec::new();
    let mut node_deletes = Vec::new();
    let mut node_inserts = Vec::new();
    for (i, image) in mapping.to2.iter().enumerate() {
        match *image {
            Some(j) => {
                let relabel = h1.concepts[i] != h2.concepts[j];
                let renamed = h1.g.nodes[i].id != h2.g.nodes[j].id;
                if relabel || renamed {
                    // Pure renames cost nothing but record the node
                    // correspondence, which replay needs to wire inserted
                    // edges to the right endpoints.
                    node_replaces.push(EditOp {
                        kind: EditKind::Replace,
                        target: EditTarget::Node,
                        from: Some(node_element(h1, i)),
                        to: Some(node_element(h2, j)),
                        cost: cm.substitution_cost_ids(h1.concepts[i], h2.concepts[j]),
                    });
                }
            }
            None => node_deletes.push(EditOp {
                kind: EditKind::Delete,
                target: EditTarget::Node,
                from: Some(node_element(h1, i)),
                to: None,
                cost: cm.deletion_cost_ids(h1.concepts[i]),
            }),
        }
    }
    for (j, pre_image) in pre.iter().enumerate() {
        if pre_image.is_none() {
            node_inserts.push(EditOp {
                kind: EditKind::Insert,
                target: EditTarget::Node,
                from: None,
                to: Some(node_element(h2, j)),
                cost: cm.insertion_cost_ids(h2.concepts[j]),
            });
        }
    }

    edge_replaces.sort_by_key(|(e, _)| *e);
    edge_deletes.sort_by_key(|(e, _)| *e);
    edge_inserts.sort_by_key(|(e, _)| *e);

    let mut ops = Vec::new();
    ops.extend(edge_replaces.into_iter().map(|(_, op)| op));
    ops.extend(edge_deletes.into_iter().map(|(_, op)| op));
    ops.extend(node_replaces);
    ops.extend(node_deletes);
    ops.extend(node_inserts);
    ops.extend(edge_inserts.into_iter().map(|(_, op)| op));
    EditPath::from_ops(ops)
}

fn node_element(h: &GraphHandle, i: usize) -> Element {
    Element::Node {
        id: h.g.nodes[i].id.clone(),
        concept: h.g.nodes[i].concept.clone(),
    }
}

fn edge_element(h: &GraphHandle, e: usize) -> Element {
    let edge = &h.g.edges[e];
    Element::Edge {
        src: edge.src.clone(),
        dst: edge.dst.clone(),
        predicate: edge.predicate.clone(),
    }
}

fn replace_edge_op(h1: &GraphHandle, e1: usize, h2: &GraphHandle, e2: usize, cm: &CostModel) -> EditOp {
    EditOp {
        kind: EditKind::Replace,
        target: EditTarget::Edge,
        from: Some(edge_element(h1, e1)),
        to: Some(edge_element(h2, e2)),
        cost: cm.substitution_cost_ids(h1.predicates[e1], h2.predicates[e2]),
    }
}

fn delete_edge_op(h1: &GraphHandle, e1: usize, cm: &CostModel) -> EditOp {
    EditOp {
        kind: EditKind::Delete,
        target: EditTarget::Edge,
        from: Some(edge_element(h1, e1)),
        to: None,
        cost: cm.deletion_cost_ids(h1.predicates[e1]),
    }
}

fn insert_edge_op(h2: &GraphHandle, e2: usize, cm: &CostModel) -> EditOp {
    EditOp {
        kind: EditKind::Insert,
        target: EditTarget::Edge,
        from: None,
        to: Some(edge_element(h2, e2)),
        cost: cm.insertion_cost_ids(h2.predicates[e2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ged::edit::verify_replay;
    use crate::graph::{ConceptNode, RoleEdge};
    use crate::taxonomy::Taxonomy;

    fn cost_model() -> CostModel {
        let edges: Vec<(String, String)> = [
            ("dog", "animal"),
            ("cat", "animal"),
            ("animal", "entity"),
            ("car", "artifact"),
            ("artifact", "entity"),
            ("chase", "entity"),
        ]
        .iter()
        .map(|(c, p)| (c.to_string(), p.to_string()))
        .collect();
        CostModel::new(Taxonomy::from_edges("entity", &edges).unwrap())
    }

    fn graph(id: &str, nodes: &[(&str, &str)], edges: &[(&str, &str, &str)]) -> SceneGraph {
        SceneGraph::new(
            id,
            nodes
                .iter()
                .map(|(i, c)| ConceptNode {
                    id: i.to_string(),
                    concept: c.to_string(),
                })
                .collect(),
            edges
                .iter()
                .map(|(s, d, p)| RoleEdge {
                    src: s.to_string(),
                    dst: d.to_string(),
                    predicate: p.to_string(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn assert_close(actual: f64, expected: f64) {
        assert!(
            (actual - expected).abs() < 1e-9,
            "expected {expected}, got {actual}"
        );
    }

    #[test]
    fn single_node_matrix_hand_values() {
        let cm = cost_model();
        let g1 = graph("g1", &[("n0", "dog")], &[]);
        let g2 = graph("g2", &[("n0", "cat")], &[]);
        let m = build_bipartite_cost_matrix(&g1, &g2, &cm).unwrap();
        assert_eq!(m.n(), 2);
        assert_close(m.get(0, 0), 2.0 / 3.0); // substitution dog -> cat
        assert_close(m.get(0, 1), 2.0 / 3.0); // delete dog
        assert_close(m.get(1, 0), 2.0 / 3.0); // insert cat
        assert_close(m.get(1, 1), 0.0);
    }

    #[test]
    fn identical_single_node_substitution_cell_is_zero() {
        let cm = cost_model();
        let g1 = graph("g1", &[("n0", "dog")], &[]);
        let g2 = graph("g2", &[("n0", "dog")], &[]);
        let m = build_bipartite_cost_matrix(&g1, &g2, &cm).unwrap();
        assert_close(m.get(0, 0), 0.0);
    }

    #[test]
    fn substitution_cell_charges_unmatched_incident_edge() {
        let cm = cost_model();
        let g1 = graph(
            "g1",
            &[("n0", "dog"), ("n1", "cat")],
            &[("n0", "n1", "chase")],
        );
        let g2 = graph("g2", &[("n0", "dog")], &[]);
        let m = build_bipartite_cost_matrix(&g1, &g2, &cm).unwrap();
        assert_eq!(m.n(), 3);
        // sub(dog, dog) = 0 plus half the deletion of the dangling chase edge.
        assert_close(m.get(0, 0), 0.5 * 0.5);
        // Deletion diagonal: node cost + half its incident edge deletions.
        assert_close(m.get(0, 1), 2.0 / 3.0 + 0.25);
        assert_close(m.get(1, 2), 2.0 / 3.0 + 0.25);
        assert_close(m.get(0, 2), LARGE);
        // Insertion row.
        assert_close(m.get(2, 0), 2.0 / 3.0);
    }

    #[test]
    fn approx_identity_is_zero_and_empty() {
        let cm = cost_model();
        let g = graph(
            "g",
            &[("n0", "dog"), ("n1", "cat")],
            &[("n0", "n1", "chase")],
        );
        let (cost, path) = approx_ged(&g, &g, &cm).unwrap();
        assert_eq!(cost, 0.0);
        assert!(path.is_empty());
    }

    #[test]
    fn approx_single_node_replace() {
        let cm = cost_model();
        let g1 = graph("g1", &[("n0", "dog")], &[]);
        let g2 = graph("g2", &[("n0", "cat")], &[]);
        let (cost, path) = approx_ged(&g1, &g2, &cm).unwrap();
        assert_close(cost, 2.0 / 3.0); // min(sub 2/3, del + ins 4/3)
        assert_eq!(path.ops.len(), 1);
        let op = &path.ops[0];
        assert_eq!((op.kind, op.target), (EditKind::Replace, EditTarget::Node));
        verify_replay(&path, &g1, &g2).unwrap();
    }

    #[test]
    fn approx_deletes_node_and_edge() {
        let cm = cost_model();
        let g1 = graph(
            "g1",
            &[("n0", "dog"), ("n1", "cat")],
            &[("n0", "n1", "chase")],
        );
        let g2 = graph("g2", &[("n0", "dog")], &[]);
        let (cost, path) = approx_ged(&g1, &g2, &cm).unwrap();
        // deletion_cost(cat) = 2/3, deletion_cost(chase) = 1/2.
        assert_close(cost, 2.0 / 3.0 + 0.5);
        let kinds: Vec<(EditKind, EditTarget)> =
            path.ops.iter().map(|op| (op.kind, op.target)).collect();
        assert_eq!(
            kinds,
            vec![
                (EditKind::Delete, EditTarget::Edge),
                (EditKind::Delete, EditTarget::Node),
            ]
        );
        verify_replay(&path, &g1, &g2).unwrap();
    }

    #[test]
    fn approx_is_direction_symmetric_on_toy_pair() {
        let cm = cost_model();
        let g1 = graph(
            "g1",
            &[("n0", "dog"), ("n1", "cat")],
            &[("n0", "n1", "chase")],
        );
        let g2 = graph("g2", &[("n0", "dog")], &[]);
        let (forward, _) = approx_ged(&g1, &g2, &cm).unwrap();
        let (backward, _) = approx_ged(&g2, &g1, &cm).unwrap();
        assert_close(forward, backward);
    }

    #[test]
    fn multiset_edit_matches_equal_labels_first() {
        let cm = cost_model();
        let t = cm.taxonomy();
        let dog = t.resolve("dog").unwrap();
        let cat = t.resolve("cat").unwrap();
        let (cost, _) = multiset_edit_plan(&[dog, cat], &[cat], &cm);
        // cat matches cat for free; dog is deleted (2/3), beating sub dog->cat
        // (2/3) ties, and beating del+ins chains.
        assert_close(cost, 2.0 / 3.0);
        let (zero, steps) = multiset_edit_plan(&[dog, dog], &[dog, dog], &cm);
        assert_eq!(zero, 0.0);
        assert_eq!(steps.len(), 2);
    }
}
