//! Network topology with per-link capacity and residual-bandwidth bookkeeping.
//!
//! The graph is directed. A bidirectional entry in a topology document
//! expands to two directed links with independent residual state; the
//! reverse direction keeps document id `id + m_declared`. Internally links
//! are stored densely and addressed by their position (`LinkIdx`), with the
//! document id retained for file interfaces and diagnostics.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::time::SimTime;

/// Node identifier: `0..n`.
pub type NodeId = u32;
/// Dense link index into [`NetworkGraph::links`].
pub type LinkIdx = usize;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("topology parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("topology error: {0}")]
    Invalid(String),
    #[error("link {link} ({from}->{to}) has residual {residual} < requested {requested}")]
    ReservationInfeasible {
        link: u64,
        from: NodeId,
        to: NodeId,
        residual: u64,
        requested: u64,
    },
    #[error(
        "accounting corruption: releasing {amount} on link {link} would exceed capacity \
         {capacity} (residual {residual})"
    )]
    AccountingCorruption {
        link: u64,
        residual: u64,
        capacity: u64,
        amount: u64,
    },
}

/// One directed link with mutable residual bandwidth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    /// Document id (reverse directions use `declared id + m_declared`).
    pub id: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: u64,
    pub residual: u64,
}

/// Directed graph over nodes `0..n` with residual-bandwidth state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    node_count: u32,
    links: Vec<Link>,
    /// Outgoing link indices per node, sorted by (head node, index).
    out_adj: Vec<Vec<LinkIdx>>,
}

/// An ingress-egress pair with its relative request frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IePair {
    pub ingress: NodeId,
    pub egress: NodeId,
    pub request_weight: f64,
}

/// One routing request: `bandwidth` units from `ingress` to `egress`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub id: u64,
    pub ingress: NodeId,
    pub egress: NodeId,
    pub bandwidth: u64,
    pub arrival: SimTime,
    /// `None` means the demand holds its bandwidth forever (static scenario).
    pub holding: Option<SimTime>,
}

/// A simple directed path, stored as consecutive link indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub links: Vec<LinkIdx>,
}

impl Path {
    pub fn new(links: Vec<LinkIdx>) -> Self {
        Self { links }
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    /// Node sequence from ingress to egress.
    pub fn nodes(&self, graph: &NetworkGraph) -> Vec<NodeId> {
        let mut nodes = Vec::with_capacity(self.links.len() + 1);
        if let Some(&first) = self.links.first() {
            nodes.push(graph.link(first).from);
        }
        for &l in &self.links {
            nodes.push(graph.link(l).to);
        }
        nodes
    }
}

/// A loaded topology: graph plus the declared IE pairs and bandwidth menu.
#[derive(Debug, Clone)]
pub struct Topology {
    pub graph: NetworkGraph,
    pub ie_pairs: Vec<IePair>,
    pub bandwidth_menu: Vec<u64>,
}

// Document schema for topology files.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    nodes: u32,
    links: Vec<LinkDoc>,
    ie_pairs: Vec<IePairDoc>,
    bandwidth_menu: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    id: u64,
    from: u32,
    to: u32,
    capacity: u64,
    bidirectional: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IePairDoc {
    ingress: u32,
    egress: u32,
    request_weight: f64,
}

/// Parses and validates a topology document (JSON syntax).
///
/// All residuals start equal to capacity. Declared link ids must be exactly
/// `0..m`; each bidirectional entry also produces the reverse link with id
/// `id + m`.
pub fn load_topology(document: &str) -> Result<Topology, NetError> {
    let doc: TopologyDoc = serde_json::from_str(document)?;
    let n = doc.nodes;
    if n < 2 {
        return Err(NetError::Invalid(format!("need at least 2 nodes, got {n}")));
    }
    let m = doc.links.len() as u64;
    let mut seen = vec![false; doc.links.len()];
    for l in &doc.links {
        if l.id >= m {
            return Err(NetError::Invalid(format!(
                "link id {} out of range (declared ids must be 0..{m})",
                l.id
            )));
        }
        if std::mem::replace(&mut seen[l.id as usize], true) {
            return Err(NetError::Invalid(format!("duplicate link id {}", l.id)));
        }
        for node in [l.from, l.to] {
            if node >= n {
                return Err(NetError::Invalid(format!(
                    "link {} references node {node}, but the graph has nodes 0..{n}",
                    l.id
                )));
            }
        }
        if l.from == l.to {
            return Err(NetError::Invalid(format!("link {} is a self-loop", l.id)));
        }
        if l.capacity == 0 {
            return Err(NetError::Invalid(format!(
                "link {} has non-positive capacity",
                l.id
            )));
        }
    }

    let mut links: Vec<Link> = doc
        .links
        .iter()
        .map(|l| Link {
            id: l.id,
            from: l.from,
            to: l.to,
            capacity: l.capacity,
            residual: l.capacity,
        })
        .collect();
    links.sort_by_key(|l| l.id);
    let mut reverse: Vec<Link> = doc
        .links
        .iter()
        .filter(|l| l.bidirectional)
        .map(|l| Link {
            id: l.id + m,
            from: l.to,
            to: l.from,
            capacity: l.capacity,
            residual: l.capacity,
        })
        .collect();
    reverse.sort_by_key(|l| l.id);
    links.extend(reverse);

    if doc.ie_pairs.is_empty() {
        return Err(NetError::Invalid("no ie_pairs declared".into()));
    }
    let mut pair_seen = HashMap::new();
    let mut ie_pairs = Vec::with_capacity(doc.ie_pairs.len());
    for p in &doc.ie_pairs {
        for node in [p.ingress, p.egress] {
            if node >= n {
                return Err(NetError::Invalid(format!(
                    "ie pair ({}, {}) references node {node}, but the graph has nodes 0..{n}",
                    p.ingress, p.egress
                )));
            }
        }
        if p.ingress == p.egress {
            return Err(NetError::Invalid(format!(
                "ie pair ({}, {}) has identical endpoints",
                p.ingress, p.egress
            )));
        }
        if !(p.request_weight.is_finite() && p.request_weight >= 0.0) {
            return Err(NetError::Invalid(format!(
                "ie pair ({}, {}) has invalid request_weight {}",
                p.ingress, p.egress, p.request_weight
            )));
        }
        if pair_seen.insert((p.ingress, p.egress), ()).is_some() {
            return Err(NetError::Invalid(format!(
                "duplicate ie pair ({}, {})",
                p.ingress, p.egress
            )));
        }
        ie_pairs.push(IePair {
            ingress: p.ingress,
            egress: p.egress,
            request_weight: p.request_weight,
        });
    }
    if ie_pairs.iter().map(|p| p.request_weight).sum::<f64>() <= 0.0 {
        return Err(NetError::Invalid(
            "ie pair request_weights sum to zero".into(),
        ));
    }

    if doc.bandwidth_menu.is_empty() {
        return Err(NetError::Invalid("bandwidth_menu is empty".into()));
    }
    if let Some(&b) = doc.bandwidth_menu.iter().find(|&&b| b == 0) {
        return Err(NetError::Invalid(format!(
            "bandwidth_menu entry {b} is non-positive"
        )));
    }

    Ok(Topology {
        graph: NetworkGraph::new(n, links),
        ie_pairs,
        bandwidth_menu: doc.bandwidth_menu,
    })
}

impl NetworkGraph {
    /// Builds a graph from already-validated links.
    pub fn new(node_count: u32, links: Vec<Link>) -> Self {
        let mut out_adj = vec![Vec::new(); node_count as usize];
        let mut order: Vec<LinkIdx> = (0..links.len()).collect();
        order.sort_by_key(|&i| (links[i].from, links[i].to, i));
        for i in order {
            out_adj[links[i].from as usize].push(i);
        }
        Self {
            node_count,
            links,
            out_adj,
        }
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, idx: LinkIdx) -> &Link {
        &self.links[idx]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Outgoing link indices of `node`, sorted by head node.
    pub fn out_links(&self, node: NodeId) -> &[LinkIdx] {
        &self.out_adj[node as usize]
    }

    /// Atomically reserves `b` bandwidth units on every link of `path`.
    ///
    /// Either all links are debited or, when any link lacks residual, none.
    pub fn reserve(&mut self, path: &Path, b: u64) -> Result<(), NetError> {
        for &idx in &path.links {
            let l = &self.links[idx];
            if l.residual < b {
                return Err(NetError::ReservationInfeasible {
                    link: l.id,
                    from: l.from,
                    to: l.to,
                    residual: l.residual,
                    requested: b,
                });
            }
        }
        for &idx in &path.links {
            self.links[idx].residual -= b;
            debug_assert!(self.links[idx].residual <= self.links[idx].capacity);
        }
        Ok(())
    }

    /// Returns `b` units to every link of `path`.
    ///
    /// Fails (leaving the graph untouched) if any link would exceed its
    /// capacity; that can only happen through a harness bug, never through
    /// workload behavior, hence the fatal error variant.
    pub fn release(&mut self, path: &Path, b: u64) -> Result<(), NetError> {
        for &idx in &path.links {
            let l = &self.links[idx];
            if l.residual + b > l.capacity {
                return Err(NetError::AccountingCorruption {
                    link: l.id,
                    residual: l.residual,
                    capacity: l.capacity,
                    amount: b,
                });
            }
        }
        for &idx in &path.links {
            self.links[idx].residual += b;
            debug_assert!(self.links[idx].residual <= self.links[idx].capacity);
        }
        Ok(())
    }

    /// Read-only view of the subgraph whose links have residual `>= b`.
    pub fn prune_infeasible(&self, b: u64) -> FeasibleView<'_> {
        FeasibleView {
            graph: self,
            min_residual: b,
        }
    }

    /// True when all residuals equal their capacities.
    pub fn is_pristine(&self) -> bool {
        self.links.iter().all(|l| l.residual == l.capacity)
    }

    /// Resets every residual to its capacity.
    pub fn reset(&mut self) {
        for l in &mut self.links {
            l.residual = l.capacity;
        }
    }

    /// Minimum hop counts from `source` to every node, ignoring bandwidth.
    pub fn hop_distances(&self, source: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count as usize];
        dist[source as usize] = Some(0);
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &idx in self.out_links(u) {
                let v = self.links[idx].to;
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Hop distances *to* `target` (BFS over reversed links), ignoring bandwidth.
    pub fn hop_distances_to(&self, target: NodeId) -> Vec<Option<u32>> {
        let mut in_adj = vec![Vec::new(); self.node_count as usize];
        for l in &self.links {
            in_adj[l.to as usize].push(l.from);
        }
        let mut dist = vec![None; self.node_count as usize];
        dist[target as usize] = Some(0);
        let mut queue = std::collections::VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &v in &in_adj[u as usize] {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Non-mutating feasibility filter over a graph borrow.
///
/// The borrow ties the view's lifetime to the graph, so it cannot outlive
/// the next reserve/release.
#[derive(Debug, Clone, Copy)]
pub struct FeasibleView<'g> {
    graph: &'g NetworkGraph,
    min_residual: u64,
}

impl<'g> FeasibleView<'g> {
    pub fn graph(&self) -> &'g NetworkGraph {
        self.graph
    }

    pub fn contains(&self, idx: LinkIdx) -> bool {
        self.graph.links[idx].residual >= self.min_residual
    }

    /// Feasible outgoing link indices of `node`, in the graph's sorted order.
    pub fn out_links(&self, node: NodeId) -> impl Iterator<Item = LinkIdx> + '_ {
        self.graph
            .out_links(node)
            .iter()
            .copied()
            .filter(move |&idx| self.contains(idx))
    }

    pub fn feasible_links(&self) -> impl Iterator<Item = LinkIdx> + '_ {
        (0..self.graph.link_count()).filter(move |&idx| self.contains(idx))
    }
}

impl Topology {
    pub fn pair_index(&self) -> HashMap<(NodeId, NodeId), usize> {
        self.ie_pairs
            .iter()
            .enumerate()
            .map(|(i, p)| ((p.ingress, p.egress), i))
            .collect()
    }

    /// SHA-256 over a canonical rendering of nodes, links, IE pairs and menu.
    ///
    /// Used to key criticality-table caches and to stamp result summaries.
    pub fn content_hash(&self) -> String {
        let mut canon = String::new();
        let _ = write!(canon, "n={};links=[", self.graph.node_count());
        for l in self.graph.links() {
            let _ = write!(canon, "({},{},{},{})", l.id, l.from, l.to, l.capacity);
        }
        canon.push_str("];ie=[");
        for p in &self.ie_pairs {
            let _ = write!(canon, "({},{},{})", p.ingress, p.egress, p.request_weight);
        }
        canon.push_str("];menu=[");
        for b in &self.bandwidth_menu {
            let _ = write!(canon, "{b},");
        }
        canon.push(']');
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
