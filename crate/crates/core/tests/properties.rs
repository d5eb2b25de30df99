//! Property suites over seeded random graphs: bookkeeping safety, catalog
//! determinism, route optimality structure, and weight purity.

use proptest::prelude::*;

use te_sim_core::algo::{mira_weights, route};
use te_sim_core::catalog::{
    build_criticality_table, enumerate_paths, k_shortest_paths, CatalogConfig,
};
use te_sim_core::net::{IePair, NetworkGraph, Path};
use te_sim_core::rng::CounterRng;
use te_sim_core::synthetic::{random_graph, SyntheticSpec};

fn spec(nodes: u32, extra: u32) -> SyntheticSpec {
    SyntheticSpec {
        nodes,
        extra_edges: extra,
        cap_min: 1,
        cap_max: 20,
        pair_count: 1,
        menu: vec![1],
    }
}

fn arb_graph() -> impl Strategy<Value = NetworkGraph> {
    (0u64..100_000, 4u32..=10, 0u32..=8)
        .prop_map(|(seed, nodes, extra)| random_graph(seed, &spec(nodes, extra)))
}

/// Some path between the graph's extreme nodes, or none.
fn pick_path(graph: &NetworkGraph, salt: u64) -> Option<Path> {
    let target = graph.node_count() - 1;
    let paths = k_shortest_paths(graph, 0, target, 5);
    if paths.is_empty() {
        return None;
    }
    Some(paths[salt as usize % paths.len()].clone())
}

proptest! {
    #[test]
    fn reserve_then_release_is_identity(graph in arb_graph(), salt in 0u64..64) {
        let mut g = graph.clone();
        let Some(path) = pick_path(&g, salt) else { return Ok(()); };
        let b = path.links.iter().map(|&l| g.link(l).residual).min().unwrap();
        prop_assume!(b >= 1);
        g.reserve(&path, b).unwrap();
        for &l in &path.links {
            prop_assert!(g.link(l).residual <= g.link(l).capacity);
        }
        g.release(&path, b).unwrap();
        prop_assert_eq!(g, graph);
    }

    #[test]
    fn prune_is_pure_and_stable(graph in arb_graph(), b in 1u64..25) {
        let before = graph.clone();
        let first: Vec<usize> = graph.prune_infeasible(b).feasible_links().collect();
        let second: Vec<usize> = graph.prune_infeasible(b).feasible_links().collect();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(&graph, &before);
        for l in first {
            prop_assert!(graph.link(l).residual >= b);
        }
    }

    #[test]
    fn criticality_table_ignores_bandwidth_state(graph in arb_graph(), salt in 0u64..64) {
        let ie = vec![IePair { ingress: 0, egress: graph.node_count() - 1, request_weight: 1.0 }];
        let cfg = CatalogConfig { slack: 3, path_cap: 50_000 };
        let Ok(before) = build_criticality_table(&graph, &ie, &cfg) else { return Ok(()); };
        let mut g = graph.clone();
        if let Some(path) = pick_path(&g, salt) {
            let b = path.links.iter().map(|&l| g.link(l).residual).min().unwrap();
            if b >= 1 {
                g.reserve(&path, b).unwrap();
            }
        }
        let after = build_criticality_table(&g, &ie, &cfg).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn occurrence_sums_count_path_link_incidences(graph in arb_graph()) {
        let egress = graph.node_count() - 1;
        let ie = vec![IePair { ingress: 0, egress, request_weight: 1.0 }];
        let cfg = CatalogConfig { slack: 3, path_cap: 50_000 };
        let Ok(table) = build_criticality_table(&graph, &ie, &cfg) else { return Ok(()); };
        let paths = enumerate_paths(&graph, 0, egress, table.hop_limit(0));
        prop_assert_eq!(table.path_count(0), paths.len() as u64);
        let occurrence_sum: u64 = (0..graph.link_count())
            .map(|l| table.occurrences(0, l))
            .sum();
        let incidences: u64 = paths.iter().map(|p| p.hops() as u64).sum();
        prop_assert_eq!(occurrence_sum, incidences);
        // crit * |P_ie| recovers the integer occurrence counts (the exact
        // check lives on the integer counts themselves; the float route
        // lands within rounding distance).
        for l in 0..graph.link_count() {
            let recovered = table.crit(0, l) * table.path_count(0) as f64;
            prop_assert_eq!(recovered.round() as u64, table.occurrences(0, l));
            prop_assert!((recovered - table.occurrences(0, l) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn k_shortest_is_prefix_of_hop_sorted_enumeration(graph in arb_graph(), k in 1usize..8) {
        let egress = graph.node_count() - 1;
        // A simple path has at most n - 1 links, so this limit covers everything.
        let mut all = enumerate_paths(&graph, 0, egress, graph.node_count() - 1);
        all.sort_by_key(|p| {
            (p.hops(), p.nodes(&graph), p.links.clone())
        });
        let got = k_shortest_paths(&graph, 0, egress, k);
        prop_assert_eq!(&got[..], &all[..k.min(all.len())]);
    }

    #[test]
    fn route_argmin_is_stable_under_power_of_two_scaling(
        graph in arb_graph(),
        wseed in 0u64..100_000,
        scale in prop::sample::select(vec![0.25f64, 0.5, 2.0, 4.0]),
    ) {
        let rng = CounterRng::new(wseed);
        let weights: Vec<f64> = (0..graph.link_count())
            .map(|i| 0.25 + rng.uniform(i as u64) * 4.0)
            .collect();
        let scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let a = route(&graph, &weights, 0, graph.node_count() - 1, 1);
        let b = route(&graph, &scaled, 0, graph.node_count() - 1, 1);
        prop_assert_eq!(a.map(|p| p.links), b.map(|p| p.links));
    }

    #[test]
    fn max_flow_value_is_invariant_under_link_permutation(graph in arb_graph(), rot in 1usize..7) {
        use te_sim_core::maxflow::max_flow;
        let target = graph.node_count() - 1;
        let base = max_flow(&graph, 0, target).flow_value;
        // Rotate the link list; ids travel with their links.
        let mut links = graph.links().to_vec();
        let rot = rot % links.len().max(1);
        links.rotate_left(rot);
        let permuted = NetworkGraph::new(graph.node_count(), links);
        prop_assert_eq!(max_flow(&permuted, 0, target).flow_value, base);
    }

    #[test]
    fn mira_weights_are_pure_and_exclude_own_pair(graph in arb_graph(), own_alpha in 0.0f64..100.0) {
        let n = graph.node_count();
        let ie = vec![
            IePair { ingress: 0, egress: n - 1, request_weight: 1.0 },
            IePair { ingress: n - 1, egress: 0, request_weight: 1.0 },
        ];
        let before = graph.clone();
        let base = mira_weights(&graph, &ie, 0, &[1.0, 1.0], 1e-6);
        prop_assert_eq!(&graph, &before);
        let bumped = mira_weights(&graph, &ie, 0, &[own_alpha, 1.0], 1e-6);
        prop_assert_eq!(base, bumped);
    }
}

/// Random reserve/release events against an independent ledger.
#[test]
fn capacity_safety_fuzz_with_ledger() {
    for seed in 0..24u64 {
        let graph = random_graph(seed, &spec(4 + (seed % 7) as u32, (seed % 9) as u32));
        let mut g = graph.clone();
        let rng = CounterRng::new(seed ^ 0xABCD);
        let mut held: Vec<(Path, u64)> = Vec::new();
        let mut counter = 0u64;
        let mut draw = move || {
            let c = counter;
            counter += 1;
            c
        };
        for _ in 0..400 {
            let release_turn = !held.is_empty() && rng.bits(draw()).is_multiple_of(2);
            if release_turn {
                let i = rng.index(draw(), held.len());
                let (path, b) = held.swap_remove(i);
                g.release(&path, b).unwrap();
            } else if let Some(path) = pick_path(&g, rng.bits(draw())) {
                let slack = path
                    .links
                    .iter()
                    .map(|&l| g.link(l).residual)
                    .min()
                    .unwrap();
                if slack >= 1 {
                    let b = 1 + rng.bits(draw()) % slack;
                    g.reserve(&path, b).unwrap();
                    held.push((path, b));
                }
            }
            // Safety and ledger equivalence after every event.
            let mut expected: Vec<u64> = graph.links().iter().map(|l| l.capacity).collect();
            for (path, b) in &held {
                for &l in &path.links {
                    expected[l] -= b;
                }
            }
            for (idx, link) in g.links().iter().enumerate() {
                assert!(link.residual <= link.capacity);
                assert_eq!(link.residual, expected[idx], "seed {seed} link {idx}");
            }
        }
    }
}
