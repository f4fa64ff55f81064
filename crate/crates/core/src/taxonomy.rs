//! Concept hierarchy and the edit-cost functions derived from it.
//!
//! The taxonomy is a rooted DAG of `child -> parent` hypernym edges. Distance
//! between two concepts is the shortest undirected path length in that graph;
//! similarity is `1 / (1 + distance)`. Replacement cost is one minus the
//! similarity, and deletion/insertion cost is the same transform applied to
//! the distance from the concept to the root.

use std::collections::{HashMap, VecDeque};
use std::path::Path;
use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{Error, Result};

/// Interned concept index within a [`Taxonomy`].
pub type ConceptId = u32;

#[derive(Debug)]
pub struct Taxonomy {
    names: Vec<String>,
    index: HashMap<String, ConceptId>,
    parents: Vec<Vec<ConceptId>>,
    children: Vec<Vec<ConceptId>>,
    root: ConceptId,
}

impl Taxonomy {
    /// Builds a taxonomy from `(child, parent)` pairs, validating that the
    /// edges form a DAG and that every concept reaches the root.
    pub fn from_edges(root: &str, edges: &[(String, String)]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, ConceptId> = HashMap::new();
        let intern = |name: &str, names: &mut Vec<String>, index: &mut HashMap<String, ConceptId>| {
            if let Some(&id) = index.get(name) {
                return id;
            }
            let id = names.len() as ConceptId;
            names.push(name.to_string());
            index.insert(name.to_string(), id);
            id
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for (child, parent) in edges {
            let c = intern(child, &mut names, &mut index);
            let p = intern(parent, &mut names, &mut index);
            pairs.push((c, p));
        }
        let root_id = *index
            .get(root)
            .ok_or_else(|| Error::Lookup(format!("root concept '{root}' does not appear in the taxonomy")))?;

        let n = names.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (c, p) in pairs {
            if !parents[c as usize].contains(&p) {
                parents[c as usize].push(p);
                children[p as usize].push(c);
            }
        }

        let taxonomy = Taxonomy {
            names,
            index,
            parents,
            children,
            root: root_id,
        };
        taxonomy.check_acyclic()?;
        taxonomy.check_connected()?;
        Ok(taxonomy)
    }

    /// DFS three-color cycle check over hypernym edges; reports the offending
    /// cycle when one exists.
    fn check_acyclic(&self) -> Result<()> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.names.len();
        let mut color = vec![WHITE; n];
        let mut stack_trace: Vec<ConceptId> = Vec::new();

        // Iterative DFS; `stack` holds (node, next parent edge to expand).
        for start in 0..n as ConceptId {
            if color[start as usize] != WHITE {
                continue;
            }
            let mut stack: Vec<(ConceptId, usize)> = vec![(start, 0)];
            color[start as usize] = GRAY;
            stack_trace.push(start);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next < self.parents[node as usize].len() {
                    let parent = self.parents[node as usize][*next];
                    *next += 1;
                    match color[parent as usize] {
                        WHITE => {
                            color[parent as usize] = GRAY;
                            stack.push((parent, 0));
                            stack_trace.push(parent);
                        }
                        GRAY => {
                            let pos = stack_trace.iter().position(|&c| c == parent).unwrap_or(0);
                            let cycle: Vec<&str> =
                                stack_trace[pos..].iter().map(|&c| self.name(c)).collect();
                            return Err(Error::Structure(format!(
                                "hypernym edges contain a cycle: {} -> {}",
                                cycle.join(" -> "),
                                self.name(parent)
                            )));
                        }
                        _ => {}
                    }
                } else {
                    color[node as usize] = BLACK;
                    stack.pop();
                    stack_trace.pop();
                }
            }
        }
        Ok(())
    }

    /// Every concept must reach the root by following parents; equivalently,
    /// every concept is reachable from the root over child edges.
    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.names.len()];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root as usize] = true;
        while let Some(node) = queue.pop_front() {
            for &child in &self.children[node as usize] {
                if !seen[child as usize] {
                    seen[child as usize] = true;
                    queue.push_back(child);
                }
            }
        }
        if let Some(orphan) = seen.iter().position(|v| !*v) {
            return Err(Error::Connectivity(format!(
                "concept '{}' does not reach the root '{}'",
                self.names[orphan],
                self.name(self.root)
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> ConceptId {
        self.root
    }

    pub fn root_name(&self) -> &str {
        self.name(self.root)
    }

    pub fn name(&self, id: ConceptId) -> &str {
        &self.names[id as usize]
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.index.contains_key(concept)
    }

    pub fn resolve(&self, concept: &str) -> Result<ConceptId> {
        self.index
            .get(concept)
            .copied()
            .ok_or_else(|| Error::Lookup(format!("concept '{concept}' is not in the taxonomy")))
    }

    /// BFS distances from `source` over the undirected hypernym graph.
    fn bfs_row(&self, source: ConceptId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.names.len()];
        let mut queue = VecDeque::from([source]);
        dist[source as usize] = 0;
        while let Some(node) = queue.pop_front() {
            let next = dist[node as usize] + 1;
            for &other in self.parents[node as usize].iter().chain(&self.children[node as usize]) {
                if dist[other as usize] == u32::MAX {
                    dist[other as usize] = next;
                    queue.push_back(other);
                }
            }
        }
        dist
    }
}

/// Loads a taxonomy from a TSV file of `child<TAB>parent` lines. Lines whose
/// first non-blank character is `#` are comments; blank lines are ignored.
pub fn load_taxonomy(path: impl AsRef<Path>, root: &str) -> Result<Taxonomy> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let child = fields.next().unwrap_or("");
        let parent = fields.next().unwrap_or("");
        if child.is_empty() || parent.is_empty() || fields.next().is_some() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                line: i + 1,
                message: format!("expected 'child<TAB>parent', found '{raw}'"),
            });
        }
        edges.push((child.to_string(), parent.to_string()));
    }
    Taxonomy::from_edges(root, &edges)
}

/// How deletion and insertion charge a concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeletionCostMode {
    /// `1 - path_similarity(a, root)`, keeping all three edit costs on the
    /// same `[0, 1)` scale.
    #[default]
    Normalized,
    /// Raw hop count from the concept to the root.
    RawHops,
}

/// Node and edge edit costs over a taxonomy, with a concurrent distance memo.
///
/// Substitution is symmetric with `sub(x, x) = 0`, and deletion equals
/// insertion, so edit paths cost the same in either direction.
pub struct CostModel {
    taxonomy: Arc<Taxonomy>,
    mode: DeletionCostMode,
    rows: DashMap<ConceptId, Arc<Vec<u32>>>,
}

impl CostModel {
    pub fn new(taxonomy: Taxonomy) -> Self {
        Self::with_mode(taxonomy, DeletionCostMode::Normalized)
    }

    pub fn with_mode(taxonomy: Taxonomy, mode: DeletionCostMode) -> Self {
        CostModel {
            taxonomy: Arc::new(taxonomy),
            mode,
            rows: DashMap::new(),
        }
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn mode(&self) -> DeletionCostMode {
        self.mode
    }

    /// Memoized distance row. Rows are keyed by the smaller endpoint so each
    /// unordered pair is computed once; concurrent fills write identical
    /// values and either winner is correct.
    fn row(&self, source: ConceptId) -> Arc<Vec<u32>> {
        if let Some(row) = self.rows.get(&source) {
            return row.clone();
        }
        let row = Arc::new(self.taxonomy.bfs_row(source));
        self.rows.entry(source).or_insert(row).clone()
    }

    pub fn distance_ids(&self, a: ConceptId, b: ConceptId) -> u32 {
        let (source, target) = if a <= b { (a, b) } else { (b, a) };
        self.row(source)[target as usize]
    }

    pub fn path_similarity_ids(&self, a: ConceptId, b: ConceptId) -> f64 {
        1.0 / (1.0 + self.distance_ids(a, b) as f64)
    }

    pub fn substitution_cost_ids(&self, a: ConceptId, b: ConceptId) -> f64 {
        1.0 - self.path_similarity_ids(a, b)
    }

    pub fn deletion_cost_ids(&self, a: ConceptId) -> f64 {
        let d = self.distance_ids(a, self.taxonomy.root());
        match self.mode {
            DeletionCostMode::Normalized => 1.0 - 1.0 / (1.0 + d as f64),
            DeletionCostMode::RawHops => d as f64,
        }
    }

    pub fn insertion_cost_ids(&self, a: ConceptId) -> f64 {
        self.deletion_cost_ids(a)
    }

    /// `1 / (1 + d(a, b))` with `d` the shortest undirected hypernym path.
    pub fn path_similarity(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.path_similarity_ids(self.taxonomy.resolve(a)?, self.taxonomy.resolve(b)?))
    }

    /// `1 - path_similarity(a, b)`.
    pub fn substitution_cost(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.substitution_cost_ids(self.taxonomy.resolve(a)?, self.taxonomy.resolve(b)?))
    }

    pub fn deletion_cost(&self, a: &str) -> Result<f64> {
        Ok(self.deletion_cost_ids(self.taxonomy.resolve(a)?))
    }

    pub fn insertion_cost(&self, a: &str) -> Result<f64> {
        self.deletion_cost(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_edges() -> Vec<(String, String)> {
        [
            ("dog", "animal"),
            ("cat", "animal"),
            ("animal", "entity"),
            ("car", "artifact"),
            ("artifact", "entity"),
        ]
        .iter()
        .map(|(c, p)| (c.to_string(), p.to_string()))
        .collect()
    }

    fn toy_model() -> CostModel {
        CostModel::new(Taxonomy::from_edges("entity", &toy_edges()).unwrap())
    }

    #[test]
    fn toy_taxonomy_loads() {
        let t = Taxonomy::from_edges("entity", &toy_edges()).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.root_name(), "entity");
    }

    #[test]
    fn cycle_is_rejected() {
        let edges = vec![
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
        ];
        let err = Taxonomy::from_edges("a", &edges).unwrap_err();
        assert_eq!(err.category(), "structure");
        assert!(err.to_string().contains("cycle"));
    }

    #[test]
    fn orphan_is_rejected() {
        let mut edges = toy_edges();
        edges.push(("x".to_string(), "y".to_string()));
        let err = Taxonomy::from_edges("entity", &edges).unwrap_err();
        assert_eq!(err.category(), "connectivity");
    }

    #[test]
    fn missing_root_is_rejected() {
        let err = Taxonomy::from_edges("nothing", &toy_edges()).unwrap_err();
        assert_eq!(err.category(), "lookup");
    }

    #[test]
    fn path_similarity_hand_values() {
        let cm = toy_model();
        assert_eq!(cm.path_similarity("dog", "dog").unwrap(), 1.0);
        // dog - animal - cat: two hops.
        assert!((cm.path_similarity("dog", "cat").unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // dog - animal - entity - artifact - car: four hops.
        assert!((cm.path_similarity("dog", "car").unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn substitution_hand_values() {
        let cm = toy_model();
        assert_eq!(cm.substitution_cost("dog", "dog").unwrap(), 0.0);
        assert!((cm.substitution_cost("dog", "cat").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((cm.substitution_cost("dog", "car").unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn deletion_hand_values() {
        let cm = toy_model();
        assert_eq!(cm.deletion_cost("entity").unwrap(), 0.0);
        assert!((cm.deletion_cost("animal").unwrap() - 0.5).abs() < 1e-12);
        assert!((cm.deletion_cost("dog").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(cm.deletion_cost("dog").unwrap(), cm.insertion_cost("dog").unwrap());
    }

    #[test]
    fn raw_hop_mode_counts_hops() {
        let cm = CostModel::with_mode(
            Taxonomy::from_edges("entity", &toy_edges()).unwrap(),
            DeletionCostMode::RawHops,
        );
        assert_eq!(cm.deletion_cost("dog").unwrap(), 2.0);
        assert_eq!(cm.deletion_cost("entity").unwrap(), 0.0);
        // Substitution is unaffected by the deletion mode.
        assert!((cm.substitution_cost("dog", "cat").unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_is_symmetric_on_all_toy_pairs() {
        let cm = toy_model();
        let names = ["dog", "cat", "animal", "car", "artifact", "entity"];
        for a in names {
            for b in names {
                assert_eq!(
                    cm.path_similarity(a, b).unwrap(),
                    cm.path_similarity(b, a).unwrap(),
                    "asymmetric for ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn costs_in_unit_range_and_deeper_deletes_cost_more() {
        let cm = toy_model();
        let names = ["dog", "cat", "animal", "car", "artifact", "entity"];
        for a in names {
            let del = cm.deletion_cost(a).unwrap();
            assert!((0.0..1.0).contains(&del));
            for b in names {
                let sub = cm.substitution_cost(a, b).unwrap();
                assert!((0.0..1.0).contains(&sub));
            }
        }
        assert!(cm.deletion_cost("dog").unwrap() > cm.deletion_cost("animal").unwrap());
        assert!(cm.deletion_cost("animal").unwrap() > cm.deletion_cost("entity").unwrap());
    }

    #[test]
    fn unknown_concept_is_lookup_error() {
        let cm = toy_model();
        assert_eq!(cm.path_similarity("dog", "ghost").unwrap_err().category(), "lookup");
        assert_eq!(cm.deletion_cost("ghost").unwrap_err().category(), "lookup");
    }
}
