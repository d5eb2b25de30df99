//! Maximum flow over residual bandwidths and mincut-critical link detection.
//!
//! Flow capacities are the links' *current residuals*, not their nominal
//! capacities: interference is about what the other pairs can still route.
//! The implementation is Edmonds-Karp (breadth-first augmenting paths),
//! which is exact and deterministic on integral capacities.

use std::collections::VecDeque;

use crate::net::{LinkIdx, NetworkGraph, NodeId};

/// Outcome of a max-flow computation between one node pair.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub flow_value: u64,
    /// Flow pushed through each graph link, aligned with `NetworkGraph::links`.
    pub link_flow: Vec<u64>,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
    /// Nodes that can still reach the sink in the final residual graph.
    pub sink_side: Vec<bool>,
}

struct ResidualNet {
    /// (head, residual capacity); edge i^1 is the reverse of edge i.
    edges: Vec<(NodeId, u64)>,
    adj: Vec<Vec<usize>>,
}

impl ResidualNet {
    fn new(graph: &NetworkGraph) -> Self {
        let mut edges = Vec::with_capacity(graph.link_count() * 2);
        let mut adj = vec![Vec::new(); graph.node_count() as usize];
        for l in graph.links() {
            let e = edges.len();
            edges.push((l.to, l.residual));
            edges.push((l.from, 0));
            adj[l.from as usize].push(e);
            adj[l.to as usize].push(e + 1);
        }
        Self { edges, adj }
    }

    /// Shortest augmenting path by edge count; returns per-node incoming edge.
    fn bfs_augment(&self, source: NodeId, sink: NodeId) -> Option<Vec<usize>> {
        let mut pred = vec![usize::MAX; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[source as usize] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u as usize] {
                let (v, cap) = self.edges[e];
                if cap > 0 && !seen[v as usize] {
                    seen[v as usize] = true;
                    pred[v as usize] = e;
                    if v == sink {
                        return Some(pred);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }

    fn reachable_from(&self, source: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source as usize] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u as usize] {
                let (v, cap) = self.edges[e];
                if cap > 0 && !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn reaching(&self, sink: NodeId) -> Vec<bool> {
        // Walk residual edges backwards: u reaches sink iff some residual
        // edge u->v exists with v reaching sink. The reverse pair of edge e
        // is e^1, so scanning adj[v] and testing edges[e^1] enumerates
        // exactly the residual in-edges of v.
        let mut seen = vec![false; self.adj.len()];
        seen[sink as usize] = true;
        let mut queue = VecDeque::from([sink]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v as usize] {
                let back = e ^ 1;
                let u = self.edges[e].0;
                if self.edges[back].1 > 0 && !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}

/// Exact maximum flow from `source` to `sink` over current residuals.
pub fn max_flow(graph: &NetworkGraph, source: NodeId, sink: NodeId) -> FlowResult {
    assert_ne!(source, sink, "max_flow endpoints must differ");
    let mut net = ResidualNet::new(graph);
    let mut flow_value = 0u64;
    while let Some(pred) = net.bfs_augment(source, sink) {
        let mut bottleneck = u64::MAX;
        let mut v = sink;
        while v != source {
            let e = pred[v as usize];
            bottleneck = bottleneck.min(net.edges[e].1);
            v = net.edges[e ^ 1].0;
        }
        let mut v = sink;
        while v != source {
            let e = pred[v as usize];
            net.edges[e].1 -= bottleneck;
            net.edges[e ^ 1].1 += bottleneck;
            v = net.edges[e ^ 1].0;
        }
        flow_value += bottleneck;
    }

    let link_flow = graph
        .links()
        .iter()
        .enumerate()
        .map(|(i, l)| l.residual - net.edges[2 * i].1)
        .collect();
    FlowResult {
        flow_value,
        link_flow,
        source_side: net.reachable_from(source),
        sink_side: net.reaching(sink),
    }
}

/// Links that belong to some minimum cut between `source` and `sink`.
///
/// A link qualifies iff the maximum flow saturates it (with positive
/// residual capacity) and the final residual graph has no path from its
/// tail to its head; reducing such a link's bandwidth by one unit reduces
/// the pair's max flow by exactly one unit.
pub fn critical_links(graph: &NetworkGraph, source: NodeId, sink: NodeId) -> Vec<LinkIdx> {
    let result = max_flow(graph, source, sink);
    critical_links_from(graph, &result)
}

/// As [`critical_links`], reusing an existing [`max_flow`] result.
pub fn critical_links_from(graph: &NetworkGraph, result: &FlowResult) -> Vec<LinkIdx> {
    let mut net = ResidualNet::new(graph);
    for (i, l) in graph.links().iter().enumerate() {
        net.edges[2 * i].1 = l.residual - result.link_flow[i];
        net.edges[2 * i + 1].1 = result.link_flow[i];
    }
    (0..graph.link_count())
        .filter(|&i| {
            let l = graph.link(i);
            l.residual > 0
                && result.link_flow[i] == l.residual
                && !net.reachable_from(l.from)[l.to as usize]
        })
        .collect()
}
