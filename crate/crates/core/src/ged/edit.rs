//! Edit operations and edit paths.
//!
//! An edit path transforms one scene graph into another through node/edge
//! replacements, deletions, and insertions. Paths produced by this engine
//! order their ops in phases so they can be replayed mechanically:
//!
//! 1. edge replacements, 2. edge deletions (both naming source-graph ids),
//! 3. node replacements, 4. node deletions, 5. node insertions,
//! 6. edge insertions (naming target-graph ids).
//!
//! Replaying a path on the source graph yields a graph whose node-label and
//! edge-label multisets match the target's; [`verify_replay`] checks exactly
//! that.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ConceptNode, RoleEdge, SceneGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Replace,
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditTarget {
    Node,
    Edge,
}

/// A node or edge reference inside an edit op. Node refs carry the concept,
/// edge refs carry endpoint ids and the predicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Node {
        id: String,
        concept: String,
    },
    Edge {
        src: String,
        dst: String,
        predicate: String,
    },
}

impl Element {
    fn is_node(&self) -> bool {
        matches!(self, Element::Node { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    pub target: EditTarget,
    pub from: Option<Element>,
    pub to: Option<Element>,
    pub cost: f64,
}

impl EditOp {
    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            EditKind::Replace => self.from.is_some() && self.to.is_some(),
            EditKind::Delete => self.from.is_some() && self.to.is_none(),
            EditKind::Insert => self.from.is_none() && self.to.is_some(),
        };
        if !ok {
            return Err(Error::Consistency(format!(
                "{:?} op must reference {} element(s)",
                self.kind,
                match self.kind {
                    EditKind::Replace => "both from and to",
                    EditKind::Delete => "only a from",
                    EditKind::Insert => "only a to",
                }
            )));
        }
        for element in self.from.iter().chain(self.to.iter()) {
            let matches_target = match self.target {
                EditTarget::Node => element.is_node(),
                EditTarget::Edge => !element.is_node(),
            };
            if !matches_target {
                return Err(Error::Consistency(format!(
                    "{:?} op on a {:?} references the wrong element kind",
                    self.kind, self.target
                )));
            }
        }
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return Err(Error::Value(format!("op cost {} is not a nonnegative finite number", self.cost)));
        }
        Ok(())
    }

    /// Replay phase rank; ops in an engine-produced path are sorted by this.
    fn phase(&self) -> u8 {
        match (self.kind, self.target) {
            (EditKind::Replace, EditTarget::Edge) => 0,
            (EditKind::Delete, EditTarget::Edge) => 1,
            (EditKind::Replace, EditTarget::Node) => 2,
            (EditKind::Delete, EditTarget::Node) => 3,
            (EditKind::Insert, EditTarget::Node) => 4,
            (EditKind::Insert, EditTarget::Edge) => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EditPath {
    pub ops: Vec<EditOp>,
    pub total_cost: f64,
}

impl EditPath {
    pub fn empty() -> Self {
        EditPath::default()
    }

    pub fn from_ops(ops: Vec<EditOp>) -> Self {
        let total_cost = ops.iter().map(|op| op.cost).sum();
        EditPath { ops, total_cost }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("edit path serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            file: "<edit path>".into(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Applies the path to `source`, producing the edited graph. Ops must
    /// arrive in replay-phase order (which engine-produced paths guarantee);
    /// references that do not resolve are consistency errors.
    pub fn apply_to(&self, source: &SceneGraph) -> Result<SceneGraph> {
        let mut state = ReplayState::new(source);
        let mut last_phase = 0u8;
        for op in &self.ops {
            op.validate()?;
            if op.phase() < last_phase {
                return Err(Error::Consistency(
                    "edit path ops are not in replay-phase order".into(),
                ));
            }
            last_phase = op.phase();
            state.apply(op)?;
        }
        state.into_graph(&source.id)
    }
}

/// Replays `path` on `source` and checks the result's node-label and
/// edge-label multisets against `target`'s, plus the total-cost invariant.
pub fn verify_replay(path: &EditPath, source: &SceneGraph, target: &SceneGraph) -> Result<()> {
    let op_sum: f64 = path.ops.iter().map(|op| op.cost).sum();
    if (op_sum - path.total_cost).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "total_cost {} differs from op-cost sum {}",
            path.total_cost, op_sum
        )));
    }
    let edited = path.apply_to(source)?;
    if edited.node_label_multiset() != target.node_label_multiset() {
        return Err(Error::Consistency(format!(
            "replayed node labels do not match target '{}'",
            target.id
        )));
    }
    if edited.edge_label_multiset() != target.edge_label_multiset() {
        return Err(Error::Consistency(format!(
            "replayed edge labels do not match target '{}'",
            target.id
        )));
    }
    Ok(())
}

struct NodeSlot {
    display_id: String,
    concept: String,
    alive: bool,
}

struct EdgeSlot {
    src: usize,
    dst: usize,
    predicate: String,
    alive: bool,
}

struct ReplayState {
    nodes: Vec<NodeSlot>,
    edges: Vec<EdgeSlot>,
    /// Live nodes still addressable by their source-graph id.
    source_ids: HashMap<String, usize>,
    /// Nodes addressable by their target-graph id (renamed or inserted).
    target_ids: HashMap<String, usize>,
}

impl ReplayState {
    fn new(g: &SceneGraph) -> Self {
        let nodes: Vec<NodeSlot> = g
            .nodes
            .iter()
            .map(|n| NodeSlot {
                display_id: n.id.clone(),
                concept: n.concept.clone(),
                alive: true,
            })
            .collect();
        let source_ids = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let index: HashMap<&str, usize> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let edges = g
            .edges
            .iter()
            .map(|e| EdgeSlot {
                src: index[e.src.as_str()],
                dst: index[e.dst.as_str()],
                predicate: e.predicate.clone(),
                alive: true,
            })
            .collect();
        ReplayState {
            nodes,
            edges,
            source_ids,
            target_ids: HashMap::new(),
        }
    }

    fn source_node(&self, id: &str) -> Result<usize> {
        self.source_ids
            .get(id)
            .copied()
            .ok_or_else(|| Error::Lookup(format!("edit path references unknown source node '{id}'")))
    }

    /// Resolves a target-graph id: renamed/inserted nodes first, then nodes
    /// kept under an unchanged id.
    fn target_node(&self, id: &str) -> Result<usize> {
        self.target_ids
            .get(id)
            .or_else(|| self.source_ids.get(id))
            .copied()
            .ok_or_else(|| Error::Lookup(format!("edit path references unknown target node '{id}'")))
    }

    fn find_live_edge(&self, src: usize, dst: usize, predicate: &str) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.alive && e.src == src && e.dst == dst && e.predicate == predicate)
    }

    fn apply(&mut self, op: &EditOp) -> Result<()> {
        match (op.kind, op.target) {
            (EditKind::Replace, EditTarget::Edge) => {
                let (src, dst, predicate) = expect_edge(op.from.as_ref())?;
                let (_, _, new_predicate) = expect_edge(op.to.as_ref())?;
                let s = self.source_node(src)?;
                let d = self.source_node(dst)?;
                let idx = self.find_live_edge(s, d, predicate).ok_or_else(|| {
                    Error::Lookup(format!("no live edge {src}->{dst} [{predicate}] to replace"))
                })?;
                self.edges[idx].predicate = new_predicate.to_string();
            }
            (EditKind::Delete, EditTarget::Edge) => {
                let (src, dst, predicate) = expect_edge(op.from.as_ref())?;
                let s = self.source_node(src)?;
                let d = self.source_node(dst)?;
                let idx = self.find_live_edge(s, d, predicate).ok_or_else(|| {
                    Error::Lookup(format!("no live edge {src}->{dst} [{predicate}] to delete"))
                })?;
                self.edges[idx].alive = false;
            }
            (EditKind::Replace, EditTarget::Node) => {
                let (id, _) = expect_node(op.from.as_ref())?;
                let (new_id, new_concept) = expect_node(op.to.as_ref())?;
                let slot = self.source_node(id)?;
                self.source_ids.remove(id);
                if self.target_ids.insert(new_id.to_string(), slot).is_some() {
                    return Err(Error::Consistency(format!(
                        "two nodes renamed to target id '{new_id}'"
                    )));
                }
                self.nodes[slot].display_id = new_id.to_string();
                self.nodes[slot].concept = new_concept.to_string();
            }
            (EditKind::Delete, EditTarget::Node) => {
                let (id, _) = expect_node(op.from.as_ref())?;
                let slot = self.source_node(id)?;
                if self.edges.iter().any(|e| e.alive && (e.src == slot || e.dst == slot)) {
                    return Err(Error::Consistency(format!(
                        "node '{id}' deleted while incident edges remain"
                    )));
                }
                self.nodes[slot].alive = false;
                self.source_ids.remove(id);
            }
            (EditKind::Insert, EditTarget::Node) => {
                let (id, concept) = expect_node(op.to.as_ref())?;
                let slot = self.nodes.len();
                self.nodes.push(NodeSlot {
                    display_id: id.to_string(),
                    concept: concept.to_string(),
                    alive: true,
                });
                if self.target_ids.insert(id.to_string(), slot).is_some() {
                    return Err(Error::Consistency(format!("target node id '{id}' inserted twice")));
                }
            }
            (EditKind::Insert, EditTarget::Edge) => {
                let (src, dst, predicate) = expect_edge(op.to.as_ref())?;
                let s = self.target_node(src)?;
                let d = self.target_node(dst)?;
                self.edges.push(EdgeSlot {
                    src: s,
                    dst: d,
                    predicate: predicate.to_string(),
                    alive: true,
                });
            }
        }
        Ok(())
    }

    fn into_graph(self, id: &str) -> Result<SceneGraph> {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, slot) in self.nodes.iter().enumerate() {
            if slot.alive {
                remap[i] = nodes.len();
                nodes.push(ConceptNode {
                    id: slot.display_id.clone(),
                    concept: slot.concept.clone(),
                });
            }
        }
        let mut edges = Vec::new();
        for edge in &self.edges {
            if !edge.alive {
                continue;
            }
            if !(self.nodes[edge.src].alive && self.nodes[edge.dst].alive) {
                return Err(Error::Consistency("replayed edge references a deleted node".into()));
            }
            edges.push(RoleEdge {
                src: nodes[remap[edge.src]].id.clone(),
                dst: nodes[remap[edge.dst]].id.clone(),
                predicate: edge.predicate.clone(),
            });
        }
        SceneGraph::new(id, nodes, edges)
    }
}

fn expect_node(element: Option<&Element>) -> Result<(&str, &str)> {
    match element {
        Some(Element::Node { id, concept }) => Ok((id, concept)),
        _ => Err(Error::Consistency("expected a node element".into())),
    }
}

fn expect_edge(element: Option<&Element>) -> Result<(&str, &str, &str)> {
    match element {
        Some(Element::Edge { src, dst, predicate }) => Ok((src, dst, predicate)),
        _ => Err(Error::Consistency("expected an edge element".into())),
    }
}
