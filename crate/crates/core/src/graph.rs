//! Scene-graph data model, dataset ingestion, validation, and splits.
//!
//! A scene graph is a directed labeled multigraph: nodes carry taxonomy
//! concepts, edges carry predicate concepts. Parallel edges and self-loops
//! are allowed. Graph and node ids are opaque strings so exports from any
//! upstream tool survive a round trip.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptNode {
    pub id: String,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleEdge {
    pub src: String,
    pub dst: String,
    pub predicate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub id: String,
    pub nodes: Vec<ConceptNode>,
    pub edges: Vec<RoleEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub isolated_node_count: usize,
    /// Edges per node. Scene graphs are sparse multigraphs, so this is the
    /// ratio edge_count / node_count rather than edges over possible edges.
    pub density: f64,
}

impl SceneGraph {
    pub fn new(id: impl Into<String>, nodes: Vec<ConceptNode>, edges: Vec<RoleEdge>) -> Result<Self> {
        let g = SceneGraph {
            id: id.into(),
            nodes,
            edges,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks the structural invariants: at least one node, unique node ids,
    /// every edge endpoint resolves, non-empty concept labels.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Consistency(format!("graph '{}' has no nodes", self.id)));
        }
        let mut seen = HashSet::with_capacity(self.nodes.len());
        for node in &self.nodes {
            if node.concept.is_empty() {
                return Err(Error::Consistency(format!(
                    "graph '{}': node '{}' has an empty concept",
                    self.id, node.id
                )));
            }
            if !seen.insert(node.id.as_str()) {
                return Err(Error::Consistency(format!(
                    "graph '{}': duplicate node id '{}'",
                    self.id, node.id
                )));
            }
        }
        for edge in &self.edges {
            for endpoint in [&edge.src, &edge.dst] {
                if !seen.contains(endpoint.as_str()) {
                    return Err(Error::Consistency(format!(
                        "graph '{}': edge {}->{} references unknown node '{}'",
                        self.id, edge.src, edge.dst, endpoint
                    )));
                }
            }
            if edge.predicate.is_empty() {
                return Err(Error::Consistency(format!(
                    "graph '{}': edge {}->{} has an empty predicate",
                    self.id, edge.src, edge.dst
                )));
            }
        }
        Ok(())
    }

    pub fn node_index(&self, node_id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == node_id)
    }

    pub fn stats(&self) -> GraphStats {
        let mut incident = vec![false; self.nodes.len()];
        let index: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        for edge in &self.edges {
            incident[index[edge.src.as_str()]] = true;
            incident[index[edge.dst.as_str()]] = true;
        }
        let isolated = incident.iter().filter(|covered| !*covered).count();
        GraphStats {
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            isolated_node_count: isolated,
            density: self.edges.len() as f64 / self.nodes.len() as f64,
        }
    }

    /// Multiset of node concepts, keyed by label with multiplicities.
    pub fn node_label_multiset(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for node in &self.nodes {
            *out.entry(node.concept.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Multiset of (source concept, predicate, target concept) triples.
    pub fn edge_label_multiset(&self) -> BTreeMap<(String, String, String), usize> {
        let index: HashMap<&str, &str> = self
            .nodes
            .iter()
            .map(|n| (n.id.as_str(), n.concept.as_str()))
            .collect();
        let mut out = BTreeMap::new();
        for edge in &self.edges {
            let key = (
                index[edge.src.as_str()].to_string(),
                edge.predicate.clone(),
                index[edge.dst.as_str()].to_string(),
            );
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }
}

/// Convenience wrapper for [`SceneGraph::stats`], mirroring the operation name
/// used by the CLI.
pub fn graph_stats(g: &SceneGraph) -> GraphStats {
    g.stats()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphsFile {
    graphs: Vec<SceneGraph>,
}

/// Parses and validates a scene-graph JSON file. Graph and node order is
/// preserved from the file.
pub fn load_graphs(path: impl AsRef<Path>) -> Result<Vec<SceneGraph>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let file: GraphsFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        file: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut ids = HashSet::new();
    for graph in &file.graphs {
        graph.validate()?;
        if !ids.insert(graph.id.as_str()) {
            return Err(Error::Consistency(format!("duplicate graph id '{}'", graph.id)));
        }
    }
    Ok(file.graphs)
}

pub fn save_graphs(path: impl AsRef<Path>, graphs: &[SceneGraph]) -> Result<()> {
    let path = path.as_ref();
    let file = GraphsFile {
        graphs: graphs.to_vec(),
    };
    let text = serde_json::to_string_pretty(&file).expect("scene graphs serialize");
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parses a labels CSV (`graph_id,label` with a header row). Returns rows in
/// file order.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    {
        let headers = reader.headers().map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        if headers.len() != 2 || &headers[0] != "graph_id" || &headers[1] != "label" {
            return Err(Error::Parse {
                file: path.display().to_string(),
                line: 1,
                message: format!("expected header 'graph_id,label', found '{}'", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        rows.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(rows)
}

pub fn save_labels(path: impl AsRef<Path>, ds: &LabeledDataset) -> Result<()> {
    let path = path.as_ref();
    let mut out = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut text = String::from("graph_id,label\n");
    for graph in &ds.graphs {
        text.push_str(&graph.id);
        text.push(',');
        text.push_str(ds.label_of(&graph.id).unwrap_or(""));
        text.push('\n');
    }
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// A list of scene graphs with exactly one class label per graph.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub graphs: Vec<SceneGraph>,
    labels: HashMap<String, String>,
}

impl LabeledDataset {
    /// Builds a dataset from parts, checking graph validity and the
    /// one-label-per-graph rule. Does not require two distinct classes:
    /// splits and programmatic toy sets may be single-class, in which case
    /// retrieval reports an eligibility error instead.
    pub fn from_parts(graphs: Vec<SceneGraph>, labels: Vec<(String, String)>) -> Result<Self> {
        let mut ids = HashSet::new();
        for graph in &graphs {
            graph.validate()?;
            if !ids.insert(graph.id.as_str()) {
                return Err(Error::Consistency(format!("duplicate graph id '{}'", graph.id)));
            }
        }
        let mut map = HashMap::with_capacity(labels.len());
        for (graph_id, label) in labels {
            if !ids.contains(graph_id.as_str()) {
                return Err(Error::Consistency(format!(
                    "label references unknown graph id '{graph_id}'"
                )));
            }
            if map.insert(graph_id.clone(), label).is_some() {
                return Err(Error::Consistency(format!(
                    "graph '{graph_id}' has more than one label"
                )));
            }
        }
        for graph in &graphs {
            if !map.contains_key(&graph.id) {
                return Err(Error::Consistency(format!("graph '{}' has no label", graph.id)));
            }
        }
        Ok(LabeledDataset { graphs, labels: map })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn label_of(&self, graph_id: &str) -> Option<&str> {
        self.labels.get(graph_id).map(|s| s.as_str())
    }

    pub fn graph_by_id(&self, graph_id: &str) -> Option<&SceneGraph> {
        self.graphs.iter().find(|g| g.id == graph_id)
    }

    pub fn graph_ids(&self) -> Vec<String> {
        self.graphs.iter().map(|g| g.id.clone()).collect()
    }

    /// Number of distinct class labels.
    pub fn class_count(&self) -> usize {
        self.labels.values().collect::<HashSet<_>>().len()
    }

    fn take(&self, indices: &[usize]) -> LabeledDataset {
        let graphs: Vec<SceneGraph> = indices.iter().map(|&i| self.graphs[i].clone()).collect();
        let labels = graphs
            .iter()
            .map(|g| (g.id.clone(), self.labels[&g.id].clone()))
            .collect();
        LabeledDataset { graphs, labels }
    }
}

/// Loads graphs plus labels and cross-validates them. Requires at least two
/// distinct class labels, since a single-class dataset admits no
/// counterfactual for any query.
pub fn load_dataset(graphs_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let graphs = load_graphs(graphs_path)?;
    let labels = load_labels(labels_path)?;
    let ds = LabeledDataset::from_parts(graphs, labels)?;
    if ds.class_count() < 2 {
        return Err(Error::Consistency(
            "dataset has fewer than two distinct class labels; no counterfactual exists".into(),
        ));
    }
    Ok(ds)
}

/// Returns the first `n` graphs (file order) satisfying all three density
/// thresholds.
pub fn split_dense(
    ds: &LabeledDataset,
    max_nodes: usize,
    min_density: f64,
    max_isolated_fraction: f64,
    n: usize,
) -> Result<LabeledDataset> {
    let qualifying: Vec<usize> = ds
        .graphs
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            let s = g.stats();
            s.node_count <= max_nodes
                && s.density >= min_density
                && (s.isolated_node_count as f64 / s.node_count as f64) <= max_isolated_fraction
        })
        .map(|(i, _)| i)
        .collect();
    if qualifying.len() < n {
        return Err(Error::Capacity {
            requested: n,
            available: qualifying.len(),
        });
    }
    Ok(ds.take(&qualifying[..n]))
}

/// Deterministic pseudo-random sample of `n` graphs. The selected graphs keep
/// their file order, so `n == len` reproduces the input unchanged.
pub fn split_random(ds: &LabeledDataset, n: usize, seed: u64) -> Result<LabeledDataset> {
    if n > ds.len() {
        return Err(Error::Capacity {
            requested: n,
            available: ds.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..ds.len()).collect();
    // Partial Fisher-Yates: the first n slots are a uniform sample.
    for i in 0..n {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut chosen: Vec<usize> = indices[..n].to_vec();
    chosen.sort_unstable();
    Ok(ds.take(&chosen))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, concept: &str) -> ConceptNode {
        ConceptNode {
            id: id.into(),
            concept: concept.into(),
        }
    }

    fn edge(src: &str, dst: &str, predicate: &str) -> RoleEdge {
        RoleEdge {
            src: src.into(),
            dst: dst.into(),
            predicate: predicate.into(),
        }
    }

    #[test]
    fn stats_single_node() {
        let g = SceneGraph::new("g", vec![node("a", "dog.n.01")], vec![]).unwrap();
        let s = g.stats();
        assert_eq!(s.node_count, 1);
        assert_eq!(s.edge_count, 0);
        assert_eq!(s.isolated_node_count, 1);
        assert_eq!(s.density, 0.0);
    }

    #[test]
    fn stats_directed_path() {
        let g = SceneGraph::new(
            "g",
            vec![node("a", "x"), node("b", "x"), node("c", "x")],
            vec![edge("a", "b", "p"), edge("b", "c", "p")],
        )
        .unwrap();
        let s = g.stats();
        assert_eq!((s.node_count, s.edge_count, s.isolated_node_count), (3, 2, 0));
        assert!((s.density - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stats_sparse() {
        let g = SceneGraph::new(
            "g",
            vec![node("a", "x"), node("b", "x"), node("c", "x"), node("d", "x")],
            vec![edge("a", "b", "p")],
        )
        .unwrap();
        let s = g.stats();
        assert_eq!((s.node_count, s.edge_count, s.isolated_node_count), (4, 1, 2));
        assert!((s.density - 0.25).abs() < 1e-12);
    }

    #[test]
    fn edge_to_missing_node_rejected() {
        let err = SceneGraph::new("g", vec![node("a", "x")], vec![edge("a", "zzz", "p")]).unwrap_err();
        assert_eq!(err.category(), "consistency");
    }

    #[test]
    fn duplicate_node_id_rejected() {
        let err = SceneGraph::new("g", vec![node("a", "x"), node("a", "y")], vec![]).unwrap_err();
        assert_eq!(err.category(), "consistency");
    }

    #[test]
    fn self_loop_and_parallel_edges_allowed() {
        let g = SceneGraph::new(
            "g",
            vec![node("a", "x"), node("b", "y")],
            vec![edge("a", "a", "p"), edge("a", "b", "p"), edge("a", "b", "q")],
        );
        assert!(g.is_ok());
    }

    fn toy_dataset() -> LabeledDataset {
        let graphs = vec![
            SceneGraph::new("g1", vec![node("a", "x"), node("b", "y")], vec![edge("a", "b", "p")]).unwrap(),
            SceneGraph::new(
                "g2",
                vec![node("a", "x"), node("b", "y"), node("c", "z")],
                vec![edge("a", "b", "p")],
            )
            .unwrap(),
            SceneGraph::new("g3", vec![node("a", "x")], vec![]).unwrap(),
        ];
        let labels = vec![
            ("g1".to_string(), "A".to_string()),
            ("g2".to_string(), "B".to_string()),
            ("g3".to_string(), "A".to_string()),
        ];
        LabeledDataset::from_parts(graphs, labels).unwrap()
    }

    #[test]
    fn from_parts_rejects_missing_label() {
        let graphs = vec![SceneGraph::new("g1", vec![node("a", "x")], vec![]).unwrap()];
        let err = LabeledDataset::from_parts(graphs, vec![]).unwrap_err();
        assert_eq!(err.category(), "consistency");
    }

    #[test]
    fn from_parts_rejects_unknown_graph_label() {
        let graphs = vec![SceneGraph::new("g1", vec![node("a", "x")], vec![]).unwrap()];
        let labels = vec![
            ("g1".to_string(), "A".to_string()),
            ("nope".to_string(), "B".to_string()),
        ];
        let err = LabeledDataset::from_parts(graphs, labels).unwrap_err();
        assert_eq!(err.category(), "consistency");
    }

    #[test]
    fn split_dense_filters() {
        let ds = toy_dataset();
        // Only g1 has density >= 0.5 and no isolated nodes.
        let split = split_dense(&ds, 10, 0.5, 0.0, 1).unwrap();
        assert_eq!(split.graph_ids(), vec!["g1"]);
        for g in &split.graphs {
            let s = g.stats();
            assert!(s.node_count <= 10);
            assert!(s.density >= 0.5);
            assert_eq!(s.isolated_node_count, 0);
        }
    }

    #[test]
    fn split_dense_identity_when_all_qualify() {
        let ds = toy_dataset();
        let split = split_dense(&ds, 100, 0.0, 1.0, ds.len()).unwrap();
        assert_eq!(split.graph_ids(), ds.graph_ids());
    }

    #[test]
    fn split_dense_capacity_error() {
        let ds = toy_dataset();
        match split_dense(&ds, 10, 0.5, 0.0, 2) {
            Err(Error::Capacity { requested, available }) => {
                assert_eq!((requested, available), (2, 1));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn split_random_is_deterministic() {
        let ds = toy_dataset();
        let a = split_random(&ds, 1, 7).unwrap();
        let b = split_random(&ds, 1, 7).unwrap();
        assert_eq!(a.graph_ids(), b.graph_ids());
        let full = split_random(&ds, ds.len(), 99).unwrap();
        assert_eq!(full.graph_ids(), ds.graph_ids());
    }

    #[test]
    fn split_random_capacity_error() {
        let ds = toy_dataset();
        assert_eq!(split_random(&ds, 4, 0).unwrap_err().category(), "capacity");
    }
}
