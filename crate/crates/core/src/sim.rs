//! Discrete-event harness: replay a demand trace against one algorithm,
//! track routing history, measure per-demand handling time, and aggregate
//! acceptance metrics; plus the multi-algorithm comparison and the TEARD
//! moderation-parameter sweep.
//!
//! A single run is strictly single-threaded (event order and history are
//! stateful). The comparison and the sweep run their independent
//! simulations through [`run_batch`], which uses the rayon pool under the
//! default `parallel` feature and plain iteration without it; each run owns
//! a private graph copy, so results do not depend on the execution mode.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algo::{
    AlgorithmConfig, AlgorithmKind, Decision, PrepareError, Router, RracePhase, TeardParams,
};
use crate::catalog::{build_criticality_table, CatalogConfig, CriticalityTable};
use crate::net::{Demand, LinkIdx, NetError, NodeId, Path, Topology};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation setup error: {0}")]
    Setup(String),
    #[error(transparent)]
    Prepare(#[from] PrepareError),
    #[error("fatal accounting error during simulation: {0}")]
    Accounting(#[from] NetError),
}

/// Whether rejected demands count toward pair request statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbCounting {
    /// Every routing request is observed, accepted or not.
    #[default]
    AllRequests,
    AcceptedOnly,
}

/// Whether link usage counts follow established paths cumulatively or only
/// the currently active ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathCounting {
    /// Counts never decrease; departures leave them untouched.
    #[default]
    Established,
    Active,
}

/// Online statistics fed to history-aware weighting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingHistory {
    pair_requests: Vec<u64>,
    total_requests: u64,
    link_established: Vec<u64>,
    total_established: u64,
}

impl RoutingHistory {
    pub fn new(pair_count: usize, link_count: usize) -> Self {
        Self {
            pair_requests: vec![0; pair_count],
            total_requests: 0,
            link_established: vec![0; link_count],
            total_established: 0,
        }
    }

    pub fn observe_request(&mut self, pair: usize) {
        self.pair_requests[pair] += 1;
        self.total_requests += 1;
    }

    pub fn establish(&mut self, path: &Path) {
        for &l in &path.links {
            self.link_established[l] += 1;
        }
        self.total_established += 1;
    }

    /// Reverses one [`establish`]; used only under active-path counting.
    pub fn retire(&mut self, path: &Path) {
        for &l in &path.links {
            debug_assert!(self.link_established[l] > 0);
            self.link_established[l] -= 1;
        }
        debug_assert!(self.total_established > 0);
        self.total_established -= 1;
    }

    /// Laplace-smoothed request probability of a pair; sums to 1 over the
    /// IE set and is uniform before the first request.
    pub fn prob(&self, pair: usize) -> f64 {
        (self.pair_requests[pair] + 1) as f64
            / (self.total_requests + self.pair_requests.len() as u64) as f64
    }

    pub fn pair_requests(&self, pair: usize) -> u64 {
        self.pair_requests[pair]
    }

    pub fn total_requests(&self) -> u64 {
        self.total_requests
    }

    pub fn established_on(&self, link: LinkIdx) -> u64 {
        self.link_established[link]
    }

    pub fn total_established(&self) -> u64 {
        self.total_established
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimOptions {
    /// Sliding-window length for the acceptance series.
    pub window: usize,
    /// Demands between consecutive window evaluations.
    pub stride: usize,
    #[serde(default)]
    pub prob_counting: ProbCounting,
    #[serde(default)]
    pub path_counting: PathCounting,
    #[serde(default)]
    pub catalog: CatalogConfig,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            window: 300,
            stride: 100,
            prob_counting: ProbCounting::default(),
            path_counting: PathCounting::default(),
            catalog: CatalogConfig::default(),
        }
    }
}

/// Outcome of one demand.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandRecord {
    pub id: u64,
    pub accepted: bool,
    /// Node sequence of the reserved path, for accepted demands.
    pub path_nodes: Option<Vec<NodeId>>,
    pub weight_total: Option<f64>,
    /// Wall-clock time of the online phase (weights + prune + route).
    pub duration_ns: u64,
    /// RRATE stage that handled the demand, when applicable.
    pub phase: Option<RracePhase>,
}

/// One point of the sliding-window acceptance series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    /// Number of demands processed at this evaluation point.
    pub demand: usize,
    pub acceptance_pct: f64,
}

/// RRATE phase breakdown of the handling durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrateSummary {
    pub learning_demands: u64,
    pub post_learning_demands: u64,
    pub learning_mean_ns: f64,
    pub post_learning_mean_ns: f64,
    pub cost_evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub algorithm: AlgorithmKind,
    pub records: Vec<DemandRecord>,
    pub accepted: u64,
    pub rejected: u64,
    pub windowed: Vec<WindowPoint>,
    pub mean_duration_ns: f64,
    pub rrate: Option<RrateSummary>,
    /// Residual state after the event queue drained (departures included).
    pub final_graph: crate::net::NetworkGraph,
}

impl SimResult {
    /// Accepted share of all demands, in percent (exact integer ratio).
    pub fn acceptance_pct(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.accepted as f64 * 100.0 / self.records.len() as f64
    }

    /// Cumulative acceptance percentage over the first `nod` demands.
    pub fn acceptance_pct_at(&self, nod: usize) -> f64 {
        let n = nod.min(self.records.len());
        if n == 0 {
            return 0.0;
        }
        let acc = self.records[..n].iter().filter(|r| r.accepted).count();
        acc as f64 * 100.0 / n as f64
    }

    /// Mean handling duration over the first `nod` demands, in nanoseconds.
    pub fn mean_duration_ns_at(&self, nod: usize) -> f64 {
        let n = nod.min(self.records.len());
        if n == 0 {
            return 0.0;
        }
        let total: u64 = self.records[..n].iter().map(|r| r.duration_ns).sum();
        total as f64 / n as f64
    }
}

enum EventKind {
    Departure { path: Path, bandwidth: u64 },
    Arrival { index: usize },
}

struct Event {
    time: SimTime,
    /// Departures (0) sort before arrivals (1) at equal timestamps.
    class: u8,
    seq: u64,
    kind: EventKind,
}

impl Event {
    fn key(&self) -> (SimTime, u8, u64) {
        (self.time, self.class, self.seq)
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Event {}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Replays `trace` on a fresh copy of the topology under one algorithm.
///
/// Events are processed in time order with departures before arrivals at
/// equal timestamps. Per arrival: request statistics update, then the timed
/// online phase (weights, pruning, path search), then reservation and
/// departure scheduling on acceptance. The offline phase (criticality
/// tables, candidate preselection) happens before the clock starts and is
/// not part of any handling duration.
pub fn run_simulation(
    topo: &Topology,
    cfg: &AlgorithmConfig,
    trace: &[Demand],
    opts: &SimOptions,
) -> Result<SimResult, SimError> {
    run_simulation_cached(topo, cfg, trace, opts, None)
}

/// As [`run_simulation`], reusing an already-built criticality table
/// (it is a pure function of the topology, so sharing it across runs is
/// sound and skips the offline phase).
pub fn run_simulation_cached(
    topo: &Topology,
    cfg: &AlgorithmConfig,
    trace: &[Demand],
    opts: &SimOptions,
    table: Option<CriticalityTable>,
) -> Result<SimResult, SimError> {
    let pair_index = topo.pair_index();
    let mut pair_of = Vec::with_capacity(trace.len());
    for d in trace {
        match pair_index.get(&(d.ingress, d.egress)) {
            Some(&idx) => pair_of.push(idx),
            None => {
                return Err(SimError::Setup(format!(
                    "demand {} pair ({}, {}) is not a declared ie pair",
                    d.id, d.ingress, d.egress
                )))
            }
        }
        if d.bandwidth == 0 {
            return Err(SimError::Setup(format!(
                "demand {} has non-positive bandwidth",
                d.id
            )));
        }
    }

    let mut router = Router::prepare(topo, cfg, &opts.catalog, table)?;
    let mut graph = topo.graph.clone();
    graph.reset();
    let mut history = RoutingHistory::new(topo.ie_pairs.len(), graph.link_count());

    let mut events = BinaryHeap::with_capacity(trace.len() * 2);
    for (i, d) in trace.iter().enumerate() {
        events.push(Reverse(Event {
            time: d.arrival,
            class: 1,
            seq: i as u64,
            kind: EventKind::Arrival { index: i },
        }));
    }

    let mut records = Vec::with_capacity(trace.len());
    let mut departure_seq = 0u64;
    while let Some(Reverse(event)) = events.pop() {
        match event.kind {
            EventKind::Departure { path, bandwidth } => {
                graph.release(&path, bandwidth)?;
                if opts.path_counting == PathCounting::Active {
                    history.retire(&path);
                }
            }
            EventKind::Arrival { index } => {
                let demand = &trace[index];
                let pair = pair_of[index];
                if opts.prob_counting == ProbCounting::AllRequests {
                    history.observe_request(pair);
                }
                let started = Instant::now();
                let decision = router.handle(&graph, &topo.ie_pairs, &history, pair, demand);
                let duration_ns = started.elapsed().as_nanos() as u64;
                match decision {
                    Decision::Accept {
                        path,
                        weight_total,
                        phase,
                    } => {
                        graph.reserve(&path, demand.bandwidth)?;
                        history.establish(&path);
                        if opts.prob_counting == ProbCounting::AcceptedOnly {
                            history.observe_request(pair);
                        }
                        if let Some(holding) = demand.holding {
                            events.push(Reverse(Event {
                                time: demand.arrival + holding,
                                class: 0,
                                seq: departure_seq,
                                kind: EventKind::Departure {
                                    path: path.clone(),
                                    bandwidth: demand.bandwidth,
                                },
                            }));
                            departure_seq += 1;
                        }
                        records.push(DemandRecord {
                            id: demand.id,
                            accepted: true,
                            path_nodes: Some(path.nodes(&graph)),
                            weight_total,
                            duration_ns,
                            phase,
                        });
                    }
                    Decision::Reject { phase } => records.push(DemandRecord {
                        id: demand.id,
                        accepted: false,
                        path_nodes: None,
                        weight_total: None,
                        duration_ns,
                        phase,
                    }),
                }
            }
        }
    }

    let accepted = records.iter().filter(|r| r.accepted).count() as u64;
    let rejected = records.len() as u64 - accepted;
    let windowed = windowed_series(&records, opts.window, opts.stride);
    let mean_duration_ns = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.duration_ns).sum::<u64>() as f64 / records.len() as f64
    };
    let rrate = router.rrate_state().map(|state| {
        let phase_stats = |phase: RracePhase| {
            let durations: Vec<u64> = records
                .iter()
                .filter(|r| r.phase == Some(phase))
                .map(|r| r.duration_ns)
                .collect();
            let mean = if durations.is_empty() {
                0.0
            } else {
                durations.iter().sum::<u64>() as f64 / durations.len() as f64
            };
            (durations.len() as u64, mean)
        };
        let (learning_demands, learning_mean_ns) = phase_stats(RracePhase::Learning);
        let (post_learning_demands, post_learning_mean_ns) = phase_stats(RracePhase::PostLearning);
        RrateSummary {
            learning_demands,
            post_learning_demands,
            learning_mean_ns,
            post_learning_mean_ns,
            cost_evaluations: state.cost_evaluations(),
        }
    });

    Ok(SimResult {
        algorithm: cfg.algorithm,
        records,
        accepted,
        rejected,
        windowed,
        mean_duration_ns,
        rrate,
        final_graph: graph,
    })
}

/// Acceptance over the trailing `window` demands, evaluated every `stride`
/// demands (plus a final partial point), `ceil(count / stride)` points.
fn windowed_series(records: &[DemandRecord], window: usize, stride: usize) -> Vec<WindowPoint> {
    let count = records.len();
    if count == 0 || stride == 0 || window == 0 {
        return Vec::new();
    }
    let mut points = Vec::with_capacity(count.div_ceil(stride));
    let mut at = stride;
    loop {
        let end = at.min(count);
        let start = end.saturating_sub(window);
        let span = &records[start..end];
        let acc = span.iter().filter(|r| r.accepted).count();
        points.push(WindowPoint {
            demand: end,
            acceptance_pct: acc as f64 * 100.0 / span.len() as f64,
        });
        if end == count {
            break;
        }
        at += stride;
    }
    points
}

/// Maps `f` over `items`, in parallel under the `parallel` feature.
pub fn run_batch<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).collect()
    }
}

/// Sequential twin of [`run_batch`], available regardless of features;
/// the benchmark suite compares the two.
pub fn run_batch_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(&f).collect()
}

/// Cumulative (acceptance, mean duration) checkpoint, Table-style.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub nod: usize,
    pub acceptance_pct: f64,
    pub mean_duration_ns: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonEntry {
    pub result: SimResult,
    pub checkpoints: Vec<Checkpoint>,
}

/// Runs every configured algorithm over the identical trace (in parallel
/// under the `parallel` feature; one private graph copy per run).
pub fn compare_algorithms(
    topo: &Topology,
    configs: &[AlgorithmConfig],
    trace: &[Demand],
    opts: &SimOptions,
) -> Result<Vec<ComparisonEntry>, SimError> {
    compare_algorithms_cached(topo, configs, trace, opts, None)
}

/// As [`compare_algorithms`], reusing an already-built criticality table.
pub fn compare_algorithms_cached(
    topo: &Topology,
    configs: &[AlgorithmConfig],
    trace: &[Demand],
    opts: &SimOptions,
    table: Option<CriticalityTable>,
) -> Result<Vec<ComparisonEntry>, SimError> {
    let needs_table = configs
        .iter()
        .any(|c| matches!(c.algorithm, AlgorithmKind::Teard | AlgorithmKind::Bgmra));
    let table = match (table, needs_table) {
        (t @ Some(_), _) => t,
        (None, true) => Some(
            build_criticality_table(&topo.graph, &topo.ie_pairs, &opts.catalog)
                .map_err(PrepareError::from)?,
        ),
        (None, false) => None,
    };
    let nods = checkpoint_nods(trace.len());
    let results = run_batch(configs, |cfg| {
        run_simulation_cached(topo, cfg, trace, opts, table.clone())
    });
    results
        .into_iter()
        .map(|r| {
            r.map(|result| {
                let checkpoints = nods
                    .iter()
                    .map(|&nod| Checkpoint {
                        nod,
                        acceptance_pct: result.acceptance_pct_at(nod),
                        mean_duration_ns: result.mean_duration_ns_at(nod),
                    })
                    .collect();
                ComparisonEntry {
                    result,
                    checkpoints,
                }
            })
        })
        .collect()
}

/// Checkpoint sizes mirroring the reference tables: 100, half, full.
pub fn checkpoint_nods(count: usize) -> Vec<usize> {
    let mut nods = vec![100, count / 2, count];
    nods.retain(|&n| n > 0 && n <= count);
    nods.sort_unstable();
    nods.dedup();
    nods
}

/// One row of the moderation-parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub acceptance_pct: f64,
}

/// Runs one full TEARD simulation per moderation triple over the identical
/// trace; rows come back sorted by acceptance descending (ties by triple).
///
/// Every triple is validated before any simulation starts.
pub fn sweep_teard(
    topo: &Topology,
    base: &AlgorithmConfig,
    trace: &[Demand],
    triples: &[(f64, f64, f64)],
    opts: &SimOptions,
) -> Result<Vec<SweepRow>, SimError> {
    for &(k1, k2, k3) in triples {
        TeardParams { k1, k2, k3 }
            .validate()
            .map_err(|e| SimError::Setup(e.to_string()))?;
    }
    let table = build_criticality_table(&topo.graph, &topo.ie_pairs, &opts.catalog)
        .map_err(PrepareError::from)?;
    let results = run_batch(triples, |&(k1, k2, k3)| {
        let cfg = AlgorithmConfig {
            algorithm: AlgorithmKind::Teard,
            teard: TeardParams { k1, k2, k3 },
            ..base.clone()
        };
        run_simulation_cached(topo, &cfg, trace, opts, Some(table.clone())).map(|r| SweepRow {
            k1,
            k2,
            k3,
            acceptance_pct: r.acceptance_pct(),
        })
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| {
        b.acceptance_pct
            .total_cmp(&a.acceptance_pct)
            .then_with(|| (a.k1, a.k2, a.k3).partial_cmp(&(b.k1, b.k2, b.k3)).unwrap())
    });
    Ok(rows)
}

/// All `(k1, k2, k3)` with positive entries on the `step` grid summing to 1.
///
/// `1/step` must round to an integer with a terminating 9-digit decimal
/// reciprocal (10 for the canonical step 0.1, giving the 36 compositions).
pub fn triple_grid(step: f64) -> Result<Vec<(f64, f64, f64)>, SimError> {
    if !(step > 0.0 && step < 1.0) {
        return Err(SimError::Setup(format!("grid step {step} out of (0, 1)")));
    }
    let q = (1.0 / step).round();
    if (1.0 / step - q).abs() > 1e-9 {
        return Err(SimError::Setup(format!(
            "grid step {step} does not evenly divide 1"
        )));
    }
    let q = q as u64;
    let mut triples = Vec::new();
    for i in 1..q {
        for j in 1..q.saturating_sub(i) {
            let k = q - i - j;
            if k >= 1 {
                triples.push((
                    i as f64 / q as f64,
                    j as f64 / q as f64,
                    k as f64 / q as f64,
                ));
            }
        }
    }
    if triples.is_empty() {
        return Err(SimError::Setup(format!(
            "grid step {step} admits no triple with all parts positive; use a finer step"
        )));
    }
    for &(k1, k2, k3) in &triples {
        TeardParams { k1, k2, k3 }.validate().map_err(|e| {
            SimError::Setup(format!("grid step {step} yields invalid triples: {e}"))
        })?;
    }
    Ok(triples)
}
