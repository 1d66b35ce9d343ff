use proptest::prelude::*;

use regen::choice::FailureHistory;
use regen::flowgraph::{
    active_vertex_trace, build_graph, gammoid_rank, is_independent, recovery_rank_at_stage, Digraph, Element,
    FlowGraph, GammoidQuery, Vertex,
};
use regen::oracle::{
    brute_linking_rank, brute_linking_rank_digraph, brute_rank_table, check_rank_axioms, ground_set,
    one_layer_agrees, MatroidSnapshot,
};
use regen::params::{collector_sets, SystemParams};

fn digraph() -> impl Strategy<Value = (Digraph, Vec<bool>, Vec<usize>)> {
    (2usize..=9).prop_flat_map(|v| {
        (
            proptest::collection::vec((0..v, 0..v), 0..(3 * v)),
            proptest::collection::vec(any::<bool>(), v),
            proptest::sample::subsequence((0..v).collect::<Vec<_>>(), 0..=v),
        )
            .prop_map(move |(edges, sinks, from)| {
                let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
                (Digraph::from_edges(v, &edges), sinks, from)
            })
    })
}

/// A flow graph over a history with arbitrary (not rule-driven) choices.
fn flow_graph(max_stages: usize) -> impl Strategy<Value = FlowGraph> {
    (3usize..=4)
        .prop_flat_map(|n| (Just(n), 1..n))
        .prop_flat_map(move |(n, k)| (Just(n), Just(k), 1..=k))
        .prop_flat_map(move |(n, k, ell)| {
            let alpha = n - ell;
            let stage = (1..=n, proptest::collection::vec(1..=alpha, n));
            (Just((n, k, ell)), proptest::collection::vec(stage, 0..=max_stages))
        })
        .prop_map(|((n, k, ell), stages)| {
            let params = SystemParams::allow_small_field(n, k, ell, 2).unwrap();
            let mut h = FailureHistory::new(n, params.alpha);
            for (failed, mut choices) in stages {
                choices[failed - 1] = 0;
                h.push_with_choices(failed, choices).unwrap();
            }
            let horizon = h.len();
            build_graph(&params, &h, horizon).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_flow_matches_path_search((g, sinks, from) in digraph()) {
        prop_assert_eq!(g.linking_rank(&from, &sinks), brute_linking_rank_digraph(&g, &sinks, &from).unwrap());
    }

    #[test]
    fn rank_table_is_a_matroid((g, sinks, _) in digraph()) {
        let table = brute_rank_table(&g, &sinks).unwrap();
        prop_assert!(check_rank_axioms(&table, g.vertex_count()).is_ok());
    }

    #[test]
    fn gammoid_rank_matches_brute_force(graph in flow_graph(2), picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..8)) {
        let v = graph.vertex_count();
        prop_assume!(v <= 30);
        let mut set: Vec<Vertex> = picks.iter().map(|i| graph.vertex(i.index(v))).collect();
        set.sort();
        set.dedup();
        prop_assert_eq!(gammoid_rank(&graph, &set), brute_linking_rank(&graph, &set).unwrap());
    }

    #[test]
    fn vertex_ids_round_trip(graph in flow_graph(4)) {
        for id in 0..graph.vertex_count() {
            prop_assert_eq!(graph.id(graph.vertex(id)), Some(id));
        }
        let p = graph.n() * graph.alpha();
        prop_assert_eq!(graph.vertex_count(), graph.file_size() + p * (graph.horizon() + 1));
        // each newcomer symbol has one in-edge per helper
        for t in 0..graph.horizon() {
            let f = graph.history().failed(t);
            for v in graph.node_vertices(t + 1, f) {
                prop_assert_eq!(graph.in_degree(v), graph.n() - 1);
            }
        }
    }

    #[test]
    fn one_layer_criterion_matches_linking(graph in flow_graph(3), mask in any::<u32>()) {
        prop_assume!(graph.horizon() > 0);
        let t = graph.horizon() - 1;
        let ground = ground_set(&graph, t, false).unwrap();
        let set: Vec<Element> = ground
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i % 32) & 1 == 1)
            .map(|(_, e)| *e)
            .take(graph.file_size())
            .collect();
        prop_assert!(one_layer_agrees(&graph, t, &set).unwrap());
        let query = GammoidQuery { t, elements: set.clone() };
        let mut vs: Vec<Vertex> = set.iter().map(|e| e.vertex(t)).collect();
        vs.sort();
        vs.dedup();
        let direct = vs.len() == set.len() && gammoid_rank(&graph, &vs) == vs.len();
        prop_assert_eq!(is_independent(&query, &graph).unwrap(), direct);
    }

    #[test]
    fn gammoid_snapshot_satisfies_axioms(graph in flow_graph(2)) {
        prop_assume!(graph.horizon() > 0);
        let snap = MatroidSnapshot::gammoid(&graph, graph.horizon() - 1, true).unwrap();
        prop_assert!(snap.check_axioms().is_ok());
    }

    #[test]
    fn rule_histories_stay_recoverable(failures in proptest::collection::vec(1usize..=4, 0..30)) {
        let params = SystemParams::new(4, 3, 2, 53).unwrap();
        let h = FailureHistory::from_failures(4, 2, &failures).unwrap();
        let graph = build_graph(&params, &h, h.len()).unwrap();
        for c in collector_sets(4, 3) {
            prop_assert_eq!(recovery_rank_at_stage(&graph, &c), 5);
            let trace = active_vertex_trace(&graph, &c).unwrap();
            prop_assert_eq!(trace.linked_to_source, 5);
            prop_assert_eq!(trace.sizes.len(), h.len() + 1);
        }
    }
}

#[test]
fn source_layer_has_full_rank_and_no_in_edges() {
    let params = SystemParams::new(5, 3, 3, 191).unwrap();
    let h = FailureHistory::from_failures(5, 2, &[1, 2, 3]).unwrap();
    let graph = build_graph(&params, &h, 3).unwrap();
    let sources: Vec<Vertex> = (1..=6).map(Vertex::Source).collect();
    assert_eq!(gammoid_rank(&graph, &sources), 6);
    for s in sources {
        assert_eq!(graph.in_degree(s), 0);
    }
    assert!(graph.source_mask()[..6].iter().all(|&b| b));
    assert!(!graph.source_mask()[6..].iter().any(|&b| b));
}

#[test]
fn brute_force_refuses_large_graphs() {
    let g = Digraph::new(31);
    let sinks = vec![false; 31];
    assert!(brute_linking_rank_digraph(&g, &sinks, &[0]).is_err());
    assert!(brute_rank_table(&Digraph::new(25), &[false; 25]).is_err());
}
