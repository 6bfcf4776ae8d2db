mod common;

use common::*;
use graphnorm::graph::are_isomorphic;
use graphnorm::Graph;
use num_rational::Ratio;
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn brute_isomorphic(g1: &Graph, g2: &Graph) -> bool {
    g1.vertex_count() == g2.vertex_count()
        && g1.edge_count() == g2.edge_count()
        && permutations(g1.vertex_count())
            .iter()
            .any(|p| g1.relabel(p).unwrap() == *g2)
}

fn is_witness(g1: &Graph, g2: &Graph, map: &[usize]) -> bool {
    g1.relabel(map).is_ok_and(|g| g == *g2)
}

/// A graph and a relabelled copy with possibly one edge toggled, so that
/// isomorphic and near-isomorphic pairs are both common.
fn near_pair() -> impl Strategy<Value = (Graph, Graph)> {
    graph(6).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), any::<bool>(), 0..n, 0..n)
    })
    .prop_map(|(g, perm, toggle, u, v)| {
        let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
        if toggle && u != v {
            let e = (u.min(v), u.max(v));
            match edges.iter().position(|&x| x == e) {
                Some(i) => {
                    edges.remove(i);
                }
                None => edges.push(e),
            }
        }
        let h = Graph::new(g.vertex_count(), edges).unwrap().relabel(&perm).unwrap();
        (g, h)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn isomorphism_agrees_with_bruteforce((g1, g2) in near_pair()) {
        let found = are_isomorphic(&g1, &g2);
        prop_assert_eq!(found.is_some(), brute_isomorphic(&g1, &g2));
        if let Some(map) = found {
            prop_assert!(is_witness(&g1, &g2, &map));
        }
    }

    #[test]
    fn isomorphism_on_unrelated_pairs(g1 in graph(6), g2 in graph(6)) {
        prop_assert_eq!(are_isomorphic(&g1, &g2).is_some(), brute_isomorphic(&g1, &g2));
        prop_assert_eq!(are_isomorphic(&g1, &g2).is_some(), are_isomorphic(&g2, &g1).is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn isomorphism_is_reflexive(g in graph(8)) {
        let map = are_isomorphic(&g, &g).expect("reflexive");
        prop_assert!(is_witness(&g, &g, &map));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn components_partition_the_graph(g in graph(9)) {
        let comps = g.components();
        let mut seen = vec![false; g.vertex_count()];
        for c in &comps {
            prop_assert!(c.graph.is_connected());
            prop_assert_eq!(c.is_singleton(), c.graph.vertex_count() == 1);
            for &v in &c.vertices {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        let union = comps
            .iter()
            .fold(Graph::empty(0), |acc, c| acc.disjoint_union(&c.graph));
        prop_assert!(are_isomorphic(&union, &g).is_some());
    }

    #[test]
    fn average_degree_mediant(g1 in graph_with_edges(6), g2 in graph_with_edges(6)) {
        let (a, b) = (g1.average_degree().unwrap(), g2.average_degree().unwrap());
        let joint = g1.disjoint_union(&g2).average_degree().unwrap();
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(lo < joint && joint < hi);
        } else {
            prop_assert_eq!(joint, a);
        }
    }

    #[test]
    fn subgraph_count_is_two_to_the_m_minus_one(g in graph(6)) {
        let all: Vec<_> = g.enumerate_subgraphs(g.vertex_count().max(1)).collect();
        prop_assert_eq!(all.len(), (1usize << g.edge_count()) - 1);
        let mut edge_sets: Vec<_> = all.iter().map(|s| s.edges.clone()).collect();
        edge_sets.sort();
        edge_sets.dedup();
        prop_assert_eq!(edge_sets.len(), all.len());
    }

    #[test]
    fn edge_list_round_trip(g in graph(8)) {
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g.clone());
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<Graph>(&json).unwrap(), g);
    }
}

#[test]
fn subgraph_count_on_c4() {
    let c4 = Graph::cycle(4);
    assert_eq!(c4.enumerate_subgraphs(4).count(), 15);
    let singles: Vec<_> = c4.enumerate_subgraphs(2).collect();
    assert_eq!(singles.len(), 4);
    assert!(singles.iter().all(|s| s.graph() == Graph::path(2)));
}

#[test]
fn average_degree_examples() {
    assert_eq!(Graph::cycle(4).average_degree().unwrap(), Ratio::from_integer(2));
    assert_eq!(Graph::star(2).average_degree().unwrap(), Ratio::new(4, 3));
    assert_eq!(Graph::star(2).copies(2).average_degree().unwrap(), Ratio::new(4, 3));
    assert!(Graph::empty(0).average_degree().is_err());
}
