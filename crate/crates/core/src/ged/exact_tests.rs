use super::bipartite::approx_ged;
use super::exact::exact_ged;
use crate::graph::{ConceptNode, RoleEdge, SceneGraph};
use crate::taxonomy::{CostModel, Taxonomy};

fn cost_model() -> CostModel {
    let edges: Vec<(String, String)> = [
        ("dog", "animal"),
        ("cat", "animal"),
        ("animal", "entity"),
        ("car", "artifact"),
        ("artifact", "entity"),
        ("chase", "entity"),
        ("near", "entity"),
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

#[test]
fn identity_is_zero() {
    let cm = cost_model();
    let g = graph(
        "g",
        &[("n0", "dog"), ("n1", "cat"), ("n2", "car")],
        &[("n0", "n1", "chase"), ("n1", "n2", "near")],
    );
    let (cost, path) = exact_ged(&g, &g, &cm, 10).unwrap();
    assert_eq!(cost, 0.0);
    assert!(path.is_empty());
}

#[test]
fn single_node_pair_considers_both_alternatives() {
    let cm = cost_model();
    let g1 = graph("g1", &[("n0", "dog")], &[]);
    let g2 = graph("g2", &[("n0", "cat")], &[]);
    let (cost, _) = exact_ged(&g1, &g2, &cm, 10).unwrap();
    assert!((cost - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn exact_never_exceeds_approx_on_toy_pairs() {
    let cm = cost_model();
    let g1 = graph(
        "g1",
        &[("n0", "dog"), ("n1", "cat")],
        &[("n0", "n1", "chase")],
    );
    let g2 = graph(
        "g2",
        &[("a", "cat"), ("b", "dog"), ("c", "car")],
        &[("a", "b", "near"), ("b", "c", "chase")],
    );
    let (exact, path) = exact_ged(&g1, &g2, &cm, 10).unwrap();
    let (approx, _) = approx_ged(&g1, &g2, &cm).unwrap();
    assert!(approx >= exact - 1e-9);
    super::edit::verify_replay(&path, &g1, &g2).unwrap();
}

#[test]
fn budget_violation_is_size_error() {
    let cm = cost_model();
    let nodes: Vec<(String, String)> = (0..11).map(|i| (format!("n{i}"), "dog".to_string())).collect();
    let node_refs: Vec<(&str, &str)> = nodes.iter().map(|(i, c)| (i.as_str(), c.as_str())).collect();
    let big = graph("big", &node_refs, &[]);
    let small = graph("small", &[("n0", "dog")], &[]);
    let err = exact_ged(&big, &small, &cm, 10).unwrap_err();
    assert_eq!(err.category(), "size");
    assert!(err.to_string().contains("approximate"));
}

#[test]
fn symmetric_within_tolerance() {
    let cm = cost_model();
    let g1 = graph(
        "g1",
        &[("n0", "dog"), ("n1", "cat")],
        &[("n0", "n1", "chase"), ("n1", "n0", "near")],
    );
    let g2 = graph("g2", &[("a", "car"), ("b", "cat")], &[("a", "b", "near")]);
    let (forward, _) = exact_ged(&g1, &g2, &cm, 10).unwrap();
    let (backward, _) = exact_ged(&g2, &g1, &cm, 10).unwrap();
    assert!((forward - backward).abs() < 1e-9);
}
