//! Offline path catalog: per-pair simple-path enumeration, link criticality
//! tables, and k-shortest candidate preselection.
//!
//! "All paths" of a pair is unbounded in general, so the catalog enumerates
//! simple paths of at most `shortest-hop distance + slack` links per pair and
//! defines path counts and occurrence rates over that set. The bound is part
//! of the table metadata; builds that would exceed `path_cap` paths for one
//! pair fail loudly instead of silently truncating the denominators.
//!
//! Everything here reads topology only, never residual bandwidth, so tables
//! stay valid across arbitrary reserve/release activity.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::net::{IePair, LinkIdx, NetworkGraph, NodeId, Path};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("ie pair ({ingress}, {egress}) is disconnected")]
    DisconnectedPair { ingress: NodeId, egress: NodeId },
    #[error(
        "ie pair ({ingress}, {egress}) exceeds the enumeration cap of {cap} paths; \
         lower the slack (or raise the cap) and rebuild"
    )]
    PathCountCapExceeded {
        ingress: NodeId,
        egress: NodeId,
        cap: usize,
    },
    #[error("criticality cache was built for a different (topology, ie, slack); rebuild it")]
    CacheKeyMismatch,
    #[error("criticality cache parse error: {0}")]
    CacheParse(#[from] serde_json::Error),
}

/// Enumeration bounds for table construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogConfig {
    /// Extra hops allowed beyond each pair's shortest-hop distance.
    pub slack: u32,
    /// Per-pair ceiling on enumerated paths before the build fails.
    pub path_cap: usize,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            slack: 4,
            path_cap: 10_000,
        }
    }
}

/// All simple paths from `ingress` to `egress` using at most `hop_limit` links.
///
/// Paths come out in depth-first order with neighbors visited by ascending
/// head node, i.e. sorted lexicographically by node sequence.
pub fn enumerate_paths(
    graph: &NetworkGraph,
    ingress: NodeId,
    egress: NodeId,
    hop_limit: u32,
) -> Vec<Path> {
    let dist_to = graph.hop_distances_to(egress);
    let mut paths = Vec::new();
    let mut visited = vec![false; graph.node_count() as usize];
    let mut stack = Vec::new();
    visited[ingress as usize] = true;
    dfs_paths(
        graph,
        ingress,
        egress,
        hop_limit,
        &dist_to,
        &mut visited,
        &mut stack,
        &mut paths,
        None,
    )
    .expect("unbounded enumeration cannot exceed a cap");
    paths
}

#[allow(clippy::too_many_arguments)]
fn dfs_paths(
    graph: &NetworkGraph,
    node: NodeId,
    egress: NodeId,
    hop_limit: u32,
    dist_to: &[Option<u32>],
    visited: &mut [bool],
    stack: &mut Vec<LinkIdx>,
    paths: &mut Vec<Path>,
    cap: Option<usize>,
) -> Result<(), ()> {
    if node == egress {
        if let Some(cap) = cap {
            if paths.len() >= cap {
                return Err(());
            }
        }
        paths.push(Path::new(stack.clone()));
        return Ok(());
    }
    for &idx in graph.out_links(node) {
        let next = graph.link(idx).to;
        if visited[next as usize] {
            continue;
        }
        // Only descend where the egress is still reachable within budget.
        match dist_to[next as usize] {
            Some(d) if stack.len() as u32 + 1 + d <= hop_limit => {}
            _ => continue,
        }
        visited[next as usize] = true;
        stack.push(idx);
        let r = dfs_paths(
            graph, next, egress, hop_limit, dist_to, visited, stack, paths, cap,
        );
        stack.pop();
        visited[next as usize] = false;
        r?;
    }
    Ok(())
}

/// Per-pair path counts and per-link occurrence counts.
///
/// Criticality of link `l` for pair `ie` is
/// `occurrences(ie, l) / path_count(ie)`; the counts are kept as integers so
/// the paper-style fractions stay exact.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityTable {
    key: String,
    slack: u32,
    pairs: Vec<PairStats>,
}

#[derive(Debug, Clone, PartialEq)]
struct PairStats {
    ingress: NodeId,
    egress: NodeId,
    hop_limit: u32,
    path_count: u64,
    occurrences: Vec<u64>,
}

impl CriticalityTable {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn slack(&self) -> u32 {
        self.slack
    }

    /// Cache key: SHA-256 of (topology, ie set, slack).
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn hop_limit(&self, pair: usize) -> u32 {
        self.pairs[pair].hop_limit
    }

    /// Number of enumerated paths for the pair (`|P_ie|`).
    pub fn path_count(&self, pair: usize) -> u64 {
        self.pairs[pair].path_count
    }

    /// Number of the pair's enumerated paths that contain the link.
    pub fn occurrences(&self, pair: usize, link: LinkIdx) -> u64 {
        self.pairs[pair].occurrences[link]
    }

    /// Occurrence rate of the link across the pair's paths, in `[0, 1]`.
    pub fn crit(&self, pair: usize, link: LinkIdx) -> f64 {
        self.pairs[pair].occurrences[link] as f64 / self.pairs[pair].path_count as f64
    }

    /// Topology-wide per-link criticality: the sum of every pair's
    /// occurrence rate on the link.
    pub fn bgmra_scores(&self) -> Vec<f64> {
        let links = self.pairs.first().map_or(0, |p| p.occurrences.len());
        let mut scores = vec![0.0; links];
        for p in &self.pairs {
            for (s, &occ) in scores.iter_mut().zip(&p.occurrences) {
                *s += occ as f64 / p.path_count as f64;
            }
        }
        scores
    }
}

fn table_key(graph: &NetworkGraph, ie: &[IePair], slack: u32) -> String {
    let mut canon = String::new();
    let _ = write!(canon, "n={};links=[", graph.node_count());
    for l in graph.links() {
        let _ = write!(canon, "({},{},{},{})", l.id, l.from, l.to, l.capacity);
    }
    canon.push_str("];ie=[");
    for p in ie {
        let _ = write!(canon, "({},{})", p.ingress, p.egress);
    }
    let _ = write!(canon, "];slack={slack}");
    Sha256::digest(canon.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Builds the offline criticality table for every IE pair.
///
/// Each pair's hop limit is its shortest-hop distance plus `cfg.slack`.
/// Fails when a pair is disconnected or exceeds `cfg.path_cap` paths.
pub fn build_criticality_table(
    graph: &NetworkGraph,
    ie: &[IePair],
    cfg: &CatalogConfig,
) -> Result<CriticalityTable, CatalogError> {
    let mut pairs = Vec::with_capacity(ie.len());
    for p in ie {
        let dist_to = graph.hop_distances_to(p.egress);
        let shortest = dist_to[p.ingress as usize].ok_or(CatalogError::DisconnectedPair {
            ingress: p.ingress,
            egress: p.egress,
        })?;
        let hop_limit = shortest + cfg.slack;

        let mut paths = Vec::new();
        let mut visited = vec![false; graph.node_count() as usize];
        let mut stack = Vec::new();
        visited[p.ingress as usize] = true;
        dfs_paths(
            graph,
            p.ingress,
            p.egress,
            hop_limit,
            &dist_to,
            &mut visited,
            &mut stack,
            &mut paths,
            Some(cfg.path_cap),
        )
        .map_err(|()| CatalogError::PathCountCapExceeded {
            ingress: p.ingress,
            egress: p.egress,
            cap: cfg.path_cap,
        })?;

        let mut occurrences = vec![0u64; graph.link_count()];
        for path in &paths {
            for &l in &path.links {
                occurrences[l] += 1;
            }
        }
        pairs.push(PairStats {
            ingress: p.ingress,
            egress: p.egress,
            hop_limit,
            path_count: paths.len() as u64,
            occurrences,
        });
    }
    Ok(CriticalityTable {
        key: table_key(graph, ie, cfg.slack),
        slack: cfg.slack,
        pairs,
    })
}

/// Topology-wide BGMRA link criticality (the summed occurrence rates).
pub fn bgmra_criticality(
    graph: &NetworkGraph,
    ie: &[IePair],
    cfg: &CatalogConfig,
) -> Result<Vec<f64>, CatalogError> {
    Ok(build_criticality_table(graph, ie, cfg)?.bgmra_scores())
}

/// Up to `k` loopless paths per pair, shortest (by hop count) first.
#[derive(Debug, Clone)]
pub struct CandidatePathSet {
    per_pair: Vec<Vec<Path>>,
}

impl CandidatePathSet {
    pub fn build(graph: &NetworkGraph, ie: &[IePair], k: usize) -> Self {
        let per_pair = ie
            .iter()
            .map(|p| k_shortest_paths(graph, p.ingress, p.egress, k))
            .collect();
        Self { per_pair }
    }

    pub fn candidates(&self, pair: usize) -> &[Path] {
        &self.per_pair[pair]
    }
}

#[derive(PartialEq, Eq)]
struct SearchEntry {
    bound: u32,
    nodes: Vec<NodeId>,
    links: Vec<LinkIdx>,
}

impl Ord for SearchEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.links.cmp(&other.links))
    }
}

impl PartialOrd for SearchEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The `k` hop-shortest loopless paths, ties broken by lexicographic node
/// sequence (then link indices, for parallel links).
///
/// Best-first search over partial paths with the remaining hop distance as
/// an exact lower bound: completed paths pop in the output order, so the
/// result is the true k-prefix of all simple paths sorted by
/// (hop count, node sequence).
pub fn k_shortest_paths(
    graph: &NetworkGraph,
    ingress: NodeId,
    egress: NodeId,
    k: usize,
) -> Vec<Path> {
    let dist_to = graph.hop_distances_to(egress);
    let mut found = Vec::new();
    if k == 0 || dist_to[ingress as usize].is_none() || ingress == egress {
        return found;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(SearchEntry {
        bound: dist_to[ingress as usize].unwrap(),
        nodes: vec![ingress],
        links: Vec::new(),
    }));
    while let Some(Reverse(entry)) = heap.pop() {
        let last = *entry.nodes.last().unwrap();
        if last == egress {
            found.push(Path::new(entry.links));
            if found.len() == k {
                break;
            }
            continue;
        }
        for &idx in graph.out_links(last) {
            let next = graph.link(idx).to;
            if entry.nodes.contains(&next) {
                continue;
            }
            let Some(remaining) = dist_to[next as usize] else {
                continue;
            };
            let mut nodes = entry.nodes.clone();
            nodes.push(next);
            let mut links = entry.links.clone();
            links.push(idx);
            heap.push(Reverse(SearchEntry {
                bound: links.len() as u32 + remaining,
                nodes,
                links,
            }));
        }
    }
    found
}

// Cache file schema (JSON syntax). Links are referenced by document id so
// the file stays meaningful outside this process.
#[derive(Debug, Serialize, Deserialize)]
struct TableDoc {
    key: String,
    slack: u32,
    pairs: Vec<PairDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PairDoc {
    ingress: NodeId,
    egress: NodeId,
    hop_limit: u32,
    path_count: u64,
    occurrences: Vec<OccurrenceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OccurrenceDoc {
    link: u64,
    count: u64,
}

impl CriticalityTable {
    /// Serializes the table for the offline-phase cache.
    pub fn to_cache_json(&self, graph: &NetworkGraph) -> String {
        let doc = TableDoc {
            key: self.key.clone(),
            slack: self.slack,
            pairs: self
                .pairs
                .iter()
                .map(|p| PairDoc {
                    ingress: p.ingress,
                    egress: p.egress,
                    hop_limit: p.hop_limit,
                    path_count: p.path_count,
                    occurrences: p
                        .occurrences
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(idx, &count)| OccurrenceDoc {
                            link: graph.link(idx).id,
                            count,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("table serialization cannot fail")
    }

    /// Loads a cached table, verifying it was built for exactly this
    /// (topology, ie set, slack).
    pub fn from_cache_json(
        json: &str,
        graph: &NetworkGraph,
        ie: &[IePair],
        cfg: &CatalogConfig,
    ) -> Result<Self, CatalogError> {
        let doc: TableDoc = serde_json::from_str(json)?;
        let expected = table_key(graph, ie, cfg.slack);
        if doc.key != expected || doc.pairs.len() != ie.len() {
            return Err(CatalogError::CacheKeyMismatch);
        }
        let by_doc_id: std::collections::HashMap<u64, LinkIdx> = graph
            .links()
            .iter()
            .enumerate()
            .map(|(idx, l)| (l.id, idx))
            .collect();
        let mut pairs = Vec::with_capacity(doc.pairs.len());
        for (p, declared) in doc.pairs.iter().zip(ie) {
            if p.ingress != declared.ingress || p.egress != declared.egress {
                return Err(CatalogError::CacheKeyMismatch);
            }
            let mut occurrences = vec![0u64; graph.link_count()];
            for o in &p.occurrences {
                let idx = by_doc_id
                    .get(&o.link)
                    .ok_or(CatalogError::CacheKeyMismatch)?;
                occurrences[*idx] = o.count;
            }
            pairs.push(PairStats {
                ingress: p.ingress,
                egress: p.egress,
                hop_limit: p.hop_limit,
                path_count: p.path_count,
                occurrences,
            });
        }
        Ok(Self {
            key: doc.key,
            slack: doc.slack,
            pairs,
        })
    }
}
