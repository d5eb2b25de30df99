//! Seeded synthetic topologies for tests and benchmarks.
//!
//! A random spanning tree (declared bidirectional, so both directions
//! exist) keeps every pair connected; extra edges add path diversity.
//! Everything derives from the counter-based stream, so a seed pins the
//! topology exactly.

use crate::net::{IePair, Link, NetworkGraph, Topology};
use crate::rng::CounterRng;

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub nodes: u32,
    /// Directed edge pairs added on top of the spanning tree.
    pub extra_edges: u32,
    pub cap_min: u64,
    pub cap_max: u64,
    pub pair_count: usize,
    pub menu: Vec<u64>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            nodes: 8,
            extra_edges: 6,
            cap_min: 1,
            cap_max: 20,
            pair_count: 2,
            menu: vec![1, 2, 3],
        }
    }
}

/// A connected random graph; all links bidirectional with uniform random
/// capacities in `[cap_min, cap_max]`.
pub fn random_graph(seed: u64, spec: &SyntheticSpec) -> NetworkGraph {
    assert!(spec.nodes >= 2 && spec.cap_min >= 1 && spec.cap_min <= spec.cap_max);
    let rng = CounterRng::new(seed);
    let mut counter = 0u64;
    let mut draw = move || {
        let c = counter;
        counter += 1;
        c
    };
    let span = spec.cap_max - spec.cap_min + 1;
    let mut declared: Vec<(u32, u32, u64)> = Vec::new();
    for v in 1..spec.nodes {
        let parent = rng.index(draw(), v as usize) as u32;
        let cap = spec.cap_min + rng.bits(draw()) % span;
        declared.push((parent, v, cap));
    }
    for _ in 0..spec.extra_edges {
        let from = rng.index(draw(), spec.nodes as usize) as u32;
        let to = rng.index(draw(), spec.nodes as usize) as u32;
        let cap = spec.cap_min + rng.bits(draw()) % span;
        if from != to {
            declared.push((from, to, cap));
        }
    }
    let m = declared.len() as u64;
    let mut links: Vec<Link> = declared
        .iter()
        .enumerate()
        .map(|(i, &(from, to, cap))| Link {
            id: i as u64,
            from,
            to,
            capacity: cap,
            residual: cap,
        })
        .collect();
    links.extend(
        declared
            .iter()
            .enumerate()
            .map(|(i, &(from, to, cap))| Link {
                id: i as u64 + m,
                from: to,
                to: from,
                capacity: cap,
                residual: cap,
            }),
    );
    NetworkGraph::new(spec.nodes, links)
}

/// A random graph plus unit-weight IE pairs and the spec's bandwidth menu.
pub fn random_topology(seed: u64, spec: &SyntheticSpec) -> Topology {
    let graph = random_graph(seed, spec);
    let rng = CounterRng::new(seed ^ 0x5EED_0F1E_1DD0_0D1E);
    let mut ie_pairs = Vec::new();
    let mut counter = 0u64;
    while ie_pairs.len() < spec.pair_count {
        let ingress = rng.index(counter, spec.nodes as usize) as u32;
        let egress = rng.index(counter + 1, spec.nodes as usize) as u32;
        counter += 2;
        if ingress != egress
            && !ie_pairs
                .iter()
                .any(|p: &IePair| (p.ingress, p.egress) == (ingress, egress))
        {
            ie_pairs.push(IePair {
                ingress,
                egress,
                request_weight: 1.0,
            });
        }
    }
    Topology {
        graph,
        ie_pairs,
        bandwidth_menu: spec.menu.clone(),
    }
}
