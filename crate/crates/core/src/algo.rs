//! The five route-selection strategies behind one interface.
//!
//! MHA, MIRA, BGMRA and TEARD compute per-link weights and then run the
//! least-weight search in [`route`]; RRATE picks directly among its
//! pre-selected candidate paths. All weight computations are pure reads of
//! graph, tables and history; only the RRATE race carries mutable state.
//!
//! Weight vectors are aligned with `NetworkGraph::links`. Entries for links
//! that fail the bandwidth check may be left at infinity: [`route`] never
//! consults links outside the feasible subgraph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{build_criticality_table, CandidatePathSet, CatalogConfig, CriticalityTable};
use crate::maxflow::critical_links;
use crate::net::{Demand, IePair, Link, LinkIdx, NetworkGraph, NodeId, Path, Topology};
use crate::sim::RoutingHistory;

/// Strategy selector, in the canonical comparison order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    #[serde(rename = "MHA")]
    Mha,
    #[serde(rename = "MIRA")]
    Mira,
    #[serde(rename = "RRATE")]
    Rrate,
    #[serde(rename = "BGMRA")]
    Bgmra,
    #[serde(rename = "TEARD")]
    Teard,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::Mha,
        AlgorithmKind::Mira,
        AlgorithmKind::Rrate,
        AlgorithmKind::Bgmra,
        AlgorithmKind::Teard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Mha => "MHA",
            AlgorithmKind::Mira => "MIRA",
            AlgorithmKind::Rrate => "RRATE",
            AlgorithmKind::Bgmra => "BGMRA",
            AlgorithmKind::Teard => "TEARD",
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.to_ascii_uppercase().as_str() {
            "MHA" => Ok(AlgorithmKind::Mha),
            "MIRA" => Ok(AlgorithmKind::Mira),
            "RRATE" => Ok(AlgorithmKind::Rrate),
            "BGMRA" => Ok(AlgorithmKind::Bgmra),
            "TEARD" => Ok(AlgorithmKind::Teard),
            other => Err(ConfigError::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown algorithm {0:?} (expected MHA, MIRA, RRATE, BGMRA, or TEARD)")]
    UnknownAlgorithm(String),
    #[error("invalid TEARD moderation parameters: {0}")]
    InvalidTeardTriple(String),
    #[error("invalid RRATE parameters: {0}")]
    InvalidRrate(String),
    #[error("invalid MIRA parameters: {0}")]
    InvalidMira(String),
}

/// TEARD moderation parameters; must be positive and sum to exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeardParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Default for TeardParams {
    fn default() -> Self {
        Self {
            k1: 0.3,
            k2: 0.4,
            k3: 0.3,
        }
    }
}

/// Value scaled to integer billionths, if it is a 9-decimal-digit rational.
fn billionths(x: f64) -> Option<i64> {
    if !x.is_finite() {
        return None;
    }
    let scaled = (x * 1e9).round();
    if (x * 1e9 - scaled).abs() > 1e-3 {
        return None;
    }
    Some(scaled as i64)
}

impl TeardParams {
    /// Checks `0 < k_i < 1` and `k1 + k2 + k3 = 1` exactly, treating the
    /// parameters as rationals on the 10^-9 decimal grid.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ks = [self.k1, self.k2, self.k3];
        let mut sum = 0i64;
        for k in ks {
            let b = billionths(k).ok_or_else(|| {
                ConfigError::InvalidTeardTriple(format!(
                    "{k} is not a decimal with at most 9 fractional digits"
                ))
            })?;
            if b <= 0 || b >= 1_000_000_000 {
                return Err(ConfigError::InvalidTeardTriple(format!(
                    "{k} is outside the open interval (0, 1)"
                )));
            }
            sum += b;
        }
        if sum != 1_000_000_000 {
            return Err(ConfigError::InvalidTeardTriple(format!(
                "{} + {} + {} != 1",
                self.k1, self.k2, self.k3
            )));
        }
        Ok(())
    }
}

/// Which residual statistic the RRATE cost denominator uses.
///
/// The published cost takes the maximum of `r(l) - b` over the path, which
/// is what `Max` reproduces; `Min` is the bottleneck variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ResidualMode {
    #[default]
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrateParams {
    /// Number of pre-selected candidate paths per pair.
    pub k: usize,
    /// Racing threshold: a path reaching this reward ends the learning stage.
    #[serde(rename = "N")]
    pub threshold: u32,
    pub k1: f64,
    pub k2: f64,
    #[serde(default)]
    pub residual_mode: ResidualMode,
}

impl Default for RrateParams {
    fn default() -> Self {
        Self {
            k: 30,
            threshold: 15,
            k1: 0.5,
            k2: 0.5,
            residual_mode: ResidualMode::Max,
        }
    }
}

impl RrateParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k < 1 {
            return Err(ConfigError::InvalidRrate("k must be >= 1".into()));
        }
        if self.threshold < 1 {
            return Err(ConfigError::InvalidRrate("N must be >= 1".into()));
        }
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !non_negative(self.k1) || !non_negative(self.k2) {
            return Err(ConfigError::InvalidRrate(
                "k1 and k2 must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiraParams {
    /// Pair-importance overrides keyed `"ingress-egress"`; absent pairs get 1.
    #[serde(default)]
    pub alpha: BTreeMap<String, f64>,
    /// Additive floor so interference-free links still cost one hop each.
    /// Zero restores the literal all-or-nothing weights.
    pub epsilon: f64,
}

impl Default for MiraParams {
    fn default() -> Self {
        Self {
            alpha: BTreeMap::new(),
            epsilon: 1e-6,
        }
    }
}

impl MiraParams {
    /// Per-pair alpha values aligned with the IE list.
    pub fn resolve_alpha(&self, ie: &[IePair]) -> Result<Vec<f64>, ConfigError> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(ConfigError::InvalidMira(format!(
                "epsilon {} must be finite and non-negative",
                self.epsilon
            )));
        }
        for key in self.alpha.keys() {
            let parsed = key
                .split_once('-')
                .and_then(|(i, e)| Some((i.parse::<NodeId>().ok()?, e.parse::<NodeId>().ok()?)));
            let Some(pair) = parsed else {
                return Err(ConfigError::InvalidMira(format!(
                    "alpha key {key:?} is not of the form \"ingress-egress\""
                )));
            };
            if !ie.iter().any(|p| (p.ingress, p.egress) == pair) {
                return Err(ConfigError::InvalidMira(format!(
                    "alpha key {key:?} does not match a declared ie pair"
                )));
            }
        }
        Ok(ie
            .iter()
            .map(|p| {
                self.alpha
                    .get(&format!("{}-{}", p.ingress, p.egress))
                    .copied()
                    .unwrap_or(1.0)
            })
            .collect())
    }
}

/// Full algorithm selection, matching the run-configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: AlgorithmKind,
    #[serde(default)]
    pub teard: TeardParams,
    #[serde(default)]
    pub rrate: RrateParams,
    #[serde(default)]
    pub mira: MiraParams,
}

impl AlgorithmConfig {
    pub fn new(algorithm: AlgorithmKind) -> Self {
        Self {
            algorithm,
            teard: TeardParams::default(),
            rrate: RrateParams::default(),
            mira: MiraParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.teard.validate()?;
        self.rrate.validate()?;
        // Alpha key validation needs the IE set; done in Router::prepare.
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Link weights
// ---------------------------------------------------------------------------

/// MHA: every link costs one hop.
pub fn mha_weights(graph: &NetworkGraph) -> Vec<f64> {
    vec![1.0; graph.link_count()]
}

/// MIRA: a link's weight is the summed alpha of every *other* IE pair for
/// which the link is currently mincut-critical, plus the hop floor epsilon.
pub fn mira_weights(
    graph: &NetworkGraph,
    ie: &[IePair],
    own_pair: usize,
    alpha: &[f64],
    epsilon: f64,
) -> Vec<f64> {
    let mut weights = vec![epsilon; graph.link_count()];
    for (idx, pair) in ie.iter().enumerate() {
        if idx == own_pair {
            continue;
        }
        for link in critical_links(graph, pair.ingress, pair.egress) {
            weights[link] += alpha[idx];
        }
    }
    weights
}

/// Per-link count of IE pairs (all of them) for which the link is currently
/// mincut-critical. This is the `C` ingredient of the RRATE cost.
pub fn mira_critical_counts(graph: &NetworkGraph, ie: &[IePair]) -> Vec<u32> {
    let mut counts = vec![0u32; graph.link_count()];
    for pair in ie {
        for link in critical_links(graph, pair.ingress, pair.egress) {
            counts[link] += 1;
        }
    }
    counts
}

/// BGMRA: offline criticality divided by current residual bandwidth.
///
/// Links with residual `< b` get an infinite placeholder; they are outside
/// the feasible subgraph and never consulted.
pub fn bgmra_weights(graph: &NetworkGraph, scores: &[f64], b: u64) -> Vec<f64> {
    graph
        .links()
        .iter()
        .zip(scores)
        .map(|(l, &score)| {
            if l.residual >= b {
                score / l.residual as f64
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// TEARD signal 1: request-probability-weighted path criticality (x100).
pub fn teard_crit1(link: LinkIdx, table: &CriticalityTable, history: &RoutingHistory) -> f64 {
    (0..table.pair_count())
        .map(|pair| table.crit(pair, link) * history.prob(pair) * 100.0)
        .sum()
}

/// TEARD signal 2: used-to-residual bandwidth ratio (x100). Requires
/// positive residual, which pruning guarantees for any `b >= 1`.
pub fn teard_crit2(link: &Link) -> f64 {
    debug_assert!(link.residual > 0);
    (link.capacity - link.residual) as f64 / link.residual as f64 * 100.0
}

/// TEARD signal 3: the link's share of all established paths (x100);
/// zero before anything has been established.
pub fn teard_crit3(link: LinkIdx, history: &RoutingHistory) -> f64 {
    let total = history.total_established();
    if total == 0 {
        return 0.0;
    }
    history.established_on(link) as f64 / total as f64 * 100.0
}

/// TEARD: convex blend of the three criticality signals on the feasible
/// subgraph (infeasible links get an infinite placeholder).
pub fn teard_weights(
    graph: &NetworkGraph,
    table: &CriticalityTable,
    history: &RoutingHistory,
    params: &TeardParams,
    b: u64,
) -> Vec<f64> {
    graph
        .links()
        .iter()
        .enumerate()
        .map(|(idx, link)| {
            if link.residual < b {
                return f64::INFINITY;
            }
            params.k1 * teard_crit1(idx, table, history)
                + params.k2 * teard_crit2(link)
                + params.k3 * teard_crit3(idx, history)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Least-weight routing
// ---------------------------------------------------------------------------

#[derive(PartialEq)]
struct RouteEntry {
    dist: f64,
    nodes: Vec<NodeId>,
    links: Vec<LinkIdx>,
}

impl Eq for RouteEntry {}

impl Ord for RouteEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.links.cmp(&other.links))
    }
}

impl PartialOrd for RouteEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Least-weight simple path for the demand on the feasible subgraph.
///
/// Dijkstra ordered by `(total weight, node sequence, link indices)`, so
/// among equal-weight optima the lexicographically smallest node sequence
/// wins and the search is fully deterministic. Returns `None` when the
/// egress is unreachable with `b` units free, which callers record as a
/// rejection rather than an error.
pub fn route(
    graph: &NetworkGraph,
    weights: &[f64],
    ingress: NodeId,
    egress: NodeId,
    b: u64,
) -> Option<Path> {
    debug_assert_ne!(ingress, egress);
    let view = graph.prune_infeasible(b);
    let mut settled = vec![false; graph.node_count() as usize];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(RouteEntry {
        dist: 0.0,
        nodes: vec![ingress],
        links: Vec::new(),
    }));
    while let Some(Reverse(entry)) = heap.pop() {
        let node = *entry.nodes.last().unwrap();
        if settled[node as usize] {
            continue;
        }
        settled[node as usize] = true;
        if node == egress {
            return Some(Path::new(entry.links));
        }
        for idx in view.out_links(node) {
            let next = graph.link(idx).to;
            if settled[next as usize] {
                continue;
            }
            let w = weights[idx];
            debug_assert!(
                w.is_finite() && w >= 0.0,
                "weight {w} on feasible link {idx}"
            );
            let mut nodes = entry.nodes.clone();
            nodes.push(next);
            let mut links = entry.links.clone();
            links.push(idx);
            heap.push(Reverse(RouteEntry {
                dist: entry.dist + w,
                nodes,
                links,
            }));
        }
    }
    None
}

/// Total weight of a path, summed in path order.
pub fn path_weight(path: &Path, weights: &[f64]) -> f64 {
    path.links.iter().map(|&l| weights[l]).sum()
}

// ---------------------------------------------------------------------------
// RRATE race
// ---------------------------------------------------------------------------

/// Cost of one candidate path for one demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathCost {
    Finite(f64),
    /// Feasible but with a zero residual term: the division guard makes the
    /// path unselectable during learning.
    Unselectable,
    /// Some link lacks the demanded bandwidth.
    Infeasible,
}

/// Evaluates the RRATE cost `k1 * C + k2 / R` for one candidate.
///
/// `C` sums, over the path's links, the number of IE pairs for which the
/// link is mincut-critical; `R` aggregates `r(l) - b` over the path links
/// according to `residual_mode`.
pub fn rrate_path_cost(
    path: &Path,
    crit_counts: &[u32],
    graph: &NetworkGraph,
    b: u64,
    params: &RrateParams,
) -> PathCost {
    let mut crit_sum = 0u64;
    let mut residual_term: Option<u64> = None;
    for &idx in &path.links {
        let link = graph.link(idx);
        if link.residual < b {
            return PathCost::Infeasible;
        }
        crit_sum += u64::from(crit_counts[idx]);
        let slack = link.residual - b;
        residual_term = Some(match (residual_term, params.residual_mode) {
            (None, _) => slack,
            (Some(r), ResidualMode::Max) => r.max(slack),
            (Some(r), ResidualMode::Min) => r.min(slack),
        });
    }
    match residual_term {
        Some(0) | None => PathCost::Unselectable,
        Some(r) => PathCost::Finite(params.k1 * crit_sum as f64 + params.k2 / r as f64),
    }
}

/// Which stage handled a demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RracePhase {
    Learning,
    PostLearning,
}

#[derive(Debug, Clone)]
struct PairRace {
    post_learning: bool,
    rewards: Vec<u32>,
}

/// Mutable racing state: per-pair stage and per-candidate rewards.
#[derive(Debug, Clone)]
pub struct RrateState {
    races: Vec<PairRace>,
    cost_evaluations: u64,
}

impl RrateState {
    pub fn new(candidates: &CandidatePathSet, pair_count: usize) -> Self {
        let races = (0..pair_count)
            .map(|p| PairRace {
                post_learning: false,
                rewards: vec![0; candidates.candidates(p).len()],
            })
            .collect();
        Self {
            races,
            cost_evaluations: 0,
        }
    }

    pub fn is_post_learning(&self, pair: usize) -> bool {
        self.races[pair].post_learning
    }

    pub fn rewards(&self, pair: usize) -> &[u32] {
        &self.races[pair].rewards
    }

    /// Number of cost evaluations performed so far (learning stage only).
    pub fn cost_evaluations(&self) -> u64 {
        self.cost_evaluations
    }
}

/// Routes one demand through the race.
///
/// Learning stage: evaluate every candidate's cost, pick the cheapest
/// selectable one (ties to the lowest candidate index), award it one reward
/// point, and end the race when that reward reaches the threshold.
/// Post-learning: pick the highest-reward candidate whose links can carry
/// the demand, falling back through the remaining candidates in descending
/// reward order; no costs are evaluated. `None` means rejection.
pub fn rrate_select(
    state: &mut RrateState,
    candidates: &CandidatePathSet,
    pair: usize,
    graph: &NetworkGraph,
    b: u64,
    params: &RrateParams,
    crit_counts: impl FnOnce() -> Vec<u32>,
) -> Option<(Path, RracePhase)> {
    let paths = candidates.candidates(pair);
    if paths.is_empty() {
        return None;
    }
    let race = &mut state.races[pair];

    if race.post_learning {
        let mut order: Vec<usize> = (0..paths.len()).collect();
        order.sort_by_key(|&i| (Reverse(race.rewards[i]), i));
        let feasible = |path: &Path| path.links.iter().all(|&idx| graph.link(idx).residual >= b);
        return order
            .into_iter()
            .find(|&i| feasible(&paths[i]))
            .map(|i| (paths[i].clone(), RracePhase::PostLearning));
    }

    let counts = crit_counts();
    let mut best: Option<(f64, usize)> = None;
    for (i, path) in paths.iter().enumerate() {
        state.cost_evaluations += 1;
        if let PathCost::Finite(cost) = rrate_path_cost(path, &counts, graph, b, params) {
            let better = match best {
                None => true,
                Some((c, _)) => cost < c,
            };
            if better {
                best = Some((cost, i));
            }
        }
    }
    let (_, winner) = best?;
    let race = &mut state.races[pair];
    race.rewards[winner] += 1;
    if race.rewards[winner] >= params.threshold {
        race.post_learning = true;
    }
    Some((paths[winner].clone(), RracePhase::Learning))
}

// ---------------------------------------------------------------------------
// Router: the common interface used by the simulation harness
// ---------------------------------------------------------------------------

/// What an algorithm decided for one demand.
#[derive(Debug, Clone)]
pub enum Decision {
    Accept {
        path: Path,
        /// Total link weight of the chosen path, for algorithms that route
        /// by weights. RRATE selects directly, so it reports none.
        weight_total: Option<f64>,
        /// Set for RRATE decisions.
        phase: Option<RracePhase>,
    },
    Reject {
        /// For RRATE, the stage the pair was in when it rejected.
        phase: Option<RracePhase>,
    },
}

#[derive(Debug, Error)]
pub enum PrepareError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("offline table build failed: {0}")]
    Catalog(#[from] crate::catalog::CatalogError),
}

/// A configured strategy, holding whatever offline products it needs.
#[derive(Debug)]
pub struct Router {
    kind: AlgorithmKind,
    teard: TeardParams,
    rrate: RrateParams,
    epsilon: f64,
    alpha: Vec<f64>,
    table: Option<CriticalityTable>,
    bgmra_scores: Option<Vec<f64>>,
    candidates: Option<CandidatePathSet>,
    rrate_state: Option<RrateState>,
}

impl Router {
    /// Runs the algorithm's offline phase against the topology.
    ///
    /// `cached_table` short-circuits the criticality build for TEARD and
    /// BGMRA when a matching cache is already loaded.
    pub fn prepare(
        topo: &Topology,
        cfg: &AlgorithmConfig,
        catalog_cfg: &CatalogConfig,
        cached_table: Option<CriticalityTable>,
    ) -> Result<Self, PrepareError> {
        cfg.validate()?;
        let alpha = cfg.mira.resolve_alpha(&topo.ie_pairs)?;
        let mut table = None;
        let mut bgmra_scores = None;
        let mut candidates = None;
        let mut rrate_state = None;
        match cfg.algorithm {
            AlgorithmKind::Mha | AlgorithmKind::Mira => {}
            AlgorithmKind::Rrate => {
                let set = CandidatePathSet::build(&topo.graph, &topo.ie_pairs, cfg.rrate.k);
                rrate_state = Some(RrateState::new(&set, topo.ie_pairs.len()));
                candidates = Some(set);
            }
            AlgorithmKind::Bgmra => {
                let t = match cached_table {
                    Some(t) => t,
                    None => build_criticality_table(&topo.graph, &topo.ie_pairs, catalog_cfg)?,
                };
                bgmra_scores = Some(t.bgmra_scores());
            }
            AlgorithmKind::Teard => {
                table = Some(match cached_table {
                    Some(t) => t,
                    None => build_criticality_table(&topo.graph, &topo.ie_pairs, catalog_cfg)?,
                });
            }
        }
        Ok(Self {
            kind: cfg.algorithm,
            teard: cfg.teard,
            rrate: cfg.rrate.clone(),
            epsilon: cfg.mira.epsilon,
            alpha,
            table,
            bgmra_scores,
            candidates,
            rrate_state,
        })
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn rrate_state(&self) -> Option<&RrateState> {
        self.rrate_state.as_ref()
    }

    /// The online phase for one demand: weights, pruning and path search
    /// (or, for RRATE, the race step). This is the timed section.
    pub fn handle(
        &mut self,
        graph: &NetworkGraph,
        ie: &[IePair],
        history: &RoutingHistory,
        pair: usize,
        demand: &Demand,
    ) -> Decision {
        let b = demand.bandwidth;
        let weights = match self.kind {
            AlgorithmKind::Mha => mha_weights(graph),
            AlgorithmKind::Mira => mira_weights(graph, ie, pair, &self.alpha, self.epsilon),
            AlgorithmKind::Bgmra => bgmra_weights(graph, self.bgmra_scores.as_ref().unwrap(), b),
            AlgorithmKind::Teard => {
                teard_weights(graph, self.table.as_ref().unwrap(), history, &self.teard, b)
            }
            AlgorithmKind::Rrate => {
                let state = self.rrate_state.as_mut().unwrap();
                let candidates = self.candidates.as_ref().unwrap();
                let params = &self.rrate;
                let stage = if state.is_post_learning(pair) {
                    RracePhase::PostLearning
                } else {
                    RracePhase::Learning
                };
                return match rrate_select(state, candidates, pair, graph, b, params, || {
                    mira_critical_counts(graph, ie)
                }) {
                    Some((path, phase)) => Decision::Accept {
                        path,
                        weight_total: None,
                        phase: Some(phase),
                    },
                    None => Decision::Reject { phase: Some(stage) },
                };
            }
        };
        match route(graph, &weights, demand.ingress, demand.egress, b) {
            Some(path) => {
                let weight_total = Some(path_weight(&path, &weights));
                Decision::Accept {
                    path,
                    weight_total,
                    phase: None,
                }
            }
            None => Decision::Reject { phase: None },
        }
    }
}
