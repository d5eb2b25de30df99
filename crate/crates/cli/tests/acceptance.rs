//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! (visible with `--nocapture`).
//!
//! Oracles here are deliberately independent re-implementations: exhaustive
//! simple-path enumeration for the router, exhaustive s-t cut enumeration
//! for the flow solver, and a reservation ledger for bandwidth bookkeeping.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use te_sim_core::algo::{
    mira_critical_counts, mira_weights, path_weight, route, rrate_path_cost, rrate_select,
    teard_crit1, teard_crit2, teard_crit3, AlgorithmConfig, AlgorithmKind, PathCost, RracePhase,
    RrateParams, RrateState, TeardParams,
};
use te_sim_core::catalog::{build_criticality_table, CandidatePathSet, CatalogConfig};
use te_sim_core::maxflow::{critical_links, max_flow};
use te_sim_core::net::{load_topology, IePair, Link, NetworkGraph, Path as RoutePath, Topology};
use te_sim_core::rng::CounterRng;
use te_sim_core::sim::{
    compare_algorithms, run_batch, sweep_teard, triple_grid, RoutingHistory, SimOptions,
};
use te_sim_core::synthetic::{random_graph, SyntheticSpec};
use te_sim_core::workload::{gen_demands, Scenario, WorkloadConfig};

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name}: {detail}");
}

fn topo_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../topologies")
        .join(name)
}

fn load(name: &str) -> Topology {
    load_topology(&fs::read_to_string(topo_path(name)).unwrap()).unwrap()
}

fn with_residuals(graph: &NetworkGraph, f: impl Fn(usize, u64) -> u64) -> NetworkGraph {
    let links: Vec<Link> = graph
        .links()
        .iter()
        .enumerate()
        .map(|(i, l)| Link {
            residual: f(i, l.residual),
            ..l.clone()
        })
        .collect();
    NetworkGraph::new(graph.node_count(), links)
}

// ---------------------------------------------------------------------------
// Criterion 1: capacity safety across 10,000 seeded random events
// ---------------------------------------------------------------------------

#[test]
fn capacity_safety_suite() {
    let started = Instant::now();
    let mut events = 0u64;
    let mut graph_seed = 0u64;
    while events < 10_000 {
        let spec = SyntheticSpec {
            nodes: 4 + (graph_seed % 9) as u32, // 4..=12
            extra_edges: (graph_seed % 10) as u32,
            cap_min: 1,
            cap_max: 30,
            ..SyntheticSpec::default()
        };
        let pristine = random_graph(graph_seed, &spec);
        let mut g = pristine.clone();
        let rng = CounterRng::new(graph_seed ^ 0x5AFE);
        let mut counter = 0u64;
        let mut draw = || {
            counter += 1;
            counter
        };
        let mut held: Vec<(RoutePath, u64)> = Vec::new();
        for _ in 0..400 {
            events += 1;
            let release_turn = !held.is_empty() && rng.bits(draw()).is_multiple_of(2);
            if release_turn {
                let i = rng.index(draw(), held.len());
                let (path, b) = held.swap_remove(i);
                g.release(&path, b).unwrap();
            } else {
                let target = g.node_count() - 1;
                let paths = te_sim_core::catalog::k_shortest_paths(&g, 0, target, 4);
                if paths.is_empty() {
                    continue;
                }
                let path = paths[rng.index(draw(), paths.len())].clone();
                let slack = path
                    .links
                    .iter()
                    .map(|&l| g.link(l).residual)
                    .min()
                    .unwrap();
                if slack == 0 {
                    continue;
                }
                let b = 1 + rng.bits(draw()) % slack;
                g.reserve(&path, b).unwrap();
                held.push((path, b));
            }
            for l in g.links() {
                assert!(l.residual <= l.capacity, "residual escaped [0, capacity]");
            }
        }
        // End-of-run ledger: capacity minus the bandwidth of held demands.
        let mut expected: Vec<u64> = pristine.links().iter().map(|l| l.capacity).collect();
        for (path, b) in &held {
            for &l in &path.links {
                expected[l] -= b;
            }
        }
        for (i, l) in g.links().iter().enumerate() {
            assert_eq!(
                l.residual, expected[i],
                "ledger mismatch (seed {graph_seed})"
            );
        }
        graph_seed += 1;
    }
    let elapsed = started.elapsed();
    report(
        "capacity-safety",
        elapsed.as_secs_f64() < 10.0,
        &format!(
            "{events} events over {graph_seed} graphs in {:.2}s (limit 10s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: Dijkstra vs exhaustive simple-path enumeration
// ---------------------------------------------------------------------------

/// Oracle: minimum left-to-right weight sum over all simple feasible paths.
#[allow(clippy::too_many_arguments)]
fn brute_force_best_weight(
    graph: &NetworkGraph,
    weights: &[f64],
    from: u32,
    to: u32,
    b: u64,
) -> Option<f64> {
    fn rec(
        graph: &NetworkGraph,
        weights: &[f64],
        node: u32,
        to: u32,
        b: u64,
        visited: &mut Vec<bool>,
        acc: f64,
        best: &mut Option<f64>,
    ) {
        if node == to {
            if best.is_none_or(|cur| acc < cur) {
                *best = Some(acc);
            }
            return;
        }
        for l in graph.links() {
            if l.from == node && l.residual >= b && !visited[l.to as usize] {
                let idx = graph
                    .links()
                    .iter()
                    .position(|x| std::ptr::eq(x, l))
                    .unwrap();
                visited[l.to as usize] = true;
                rec(
                    graph,
                    weights,
                    l.to,
                    to,
                    b,
                    visited,
                    acc + weights[idx],
                    best,
                );
                visited[l.to as usize] = false;
            }
        }
    }
    let mut visited = vec![false; graph.node_count() as usize];
    visited[from as usize] = true;
    let mut best = None;
    rec(graph, weights, from, to, b, &mut visited, 0.0, &mut best);
    best
}

#[test]
fn dijkstra_oracle() {
    let started = Instant::now();
    let mut checked = 0;
    for seed in 0..1000u64 {
        let spec = SyntheticSpec {
            nodes: 3 + (seed % 6) as u32, // 3..=8
            extra_edges: (seed % 8) as u32,
            cap_min: 1,
            cap_max: 12,
            ..SyntheticSpec::default()
        };
        let graph = random_graph(seed, &spec);
        let rng = CounterRng::new(seed ^ 0xD1D5);
        let weights: Vec<f64> = (0..graph.link_count())
            .map(|i| 0.1 + rng.uniform(i as u64) * 9.9)
            .collect();
        let b = 1 + rng.bits(1_000_000) % 8;
        let target = graph.node_count() - 1;
        let oracle = brute_force_best_weight(&graph, &weights, 0, target, b);
        match route(&graph, &weights, 0, target, b) {
            Some(path) => {
                let got = path_weight(&path, &weights);
                assert_eq!(
                    Some(got),
                    oracle,
                    "seed {seed}: route weight differs from enumeration minimum"
                );
                checked += 1;
            }
            None => assert!(
                oracle.is_none(),
                "seed {seed}: route missed a feasible path"
            ),
        }
    }
    let elapsed = started.elapsed();
    report(
        "dijkstra-oracle",
        elapsed.as_secs_f64() < 30.0,
        &format!(
            "1000 graphs ({checked} routable) in {:.2}s (limit 30s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: max flow vs exhaustive cut enumeration, plus decrement tests
// ---------------------------------------------------------------------------

/// Oracle: minimum over all s-t node partitions of the forward cut value.
fn brute_force_min_cut(graph: &NetworkGraph, s: u32, t: u32) -> u64 {
    let n = graph.node_count();
    let inner: Vec<u32> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = u64::MAX;
    for mask in 0u32..(1 << inner.len()) {
        let mut in_s = vec![false; n as usize];
        in_s[s as usize] = true;
        for (bit, &v) in inner.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                in_s[v as usize] = true;
            }
        }
        let cut: u64 = graph
            .links()
            .iter()
            .filter(|l| in_s[l.from as usize] && !in_s[l.to as usize])
            .map(|l| l.residual)
            .sum();
        best = best.min(cut);
    }
    best
}

#[test]
fn maxflow_mincut_oracle() {
    let started = Instant::now();
    let mut decrements = 0u64;
    for seed in 0..500u64 {
        let spec = SyntheticSpec {
            nodes: 4 + (seed % 7) as u32, // 4..=10
            extra_edges: (seed % 9) as u32,
            cap_min: 1,
            cap_max: 20,
            ..SyntheticSpec::default()
        };
        let graph = random_graph(seed ^ 0xF10D, &spec);
        let (s, t) = (0u32, graph.node_count() - 1);
        let flow = max_flow(&graph, s, t);
        assert_eq!(
            flow.flow_value,
            brute_force_min_cut(&graph, s, t),
            "seed {seed}: flow != brute-force min cut"
        );
        let critical = critical_links(&graph, s, t);
        for idx in 0..graph.link_count() {
            let link = graph.link(idx);
            let saturated = link.residual > 0 && flow.link_flow[idx] == link.residual;
            let is_critical = critical.contains(&idx);
            assert!(
                !is_critical || saturated,
                "seed {seed}: critical link {idx} is not saturated"
            );
            if !saturated {
                continue;
            }
            decrements += 1;
            let reduced = with_residuals(&graph, |i, r| if i == idx { r - 1 } else { r });
            let new_flow = max_flow(&reduced, s, t).flow_value;
            if is_critical {
                assert_eq!(
                    new_flow,
                    flow.flow_value - 1,
                    "seed {seed}: critical link {idx} fails the decrement test"
                );
            } else {
                assert_eq!(
                    new_flow, flow.flow_value,
                    "seed {seed}: non-critical saturated link {idx} changed the flow"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    report(
        "maxflow-mincut-oracle",
        elapsed.as_secs_f64() < 60.0,
        &format!(
            "500 graphs, {decrements} decrement checks in {:.2}s (limit 60s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: equation unit vectors against independent recomputation
// ---------------------------------------------------------------------------

fn ulp_diff(a: f64, b: f64) -> u64 {
    assert!(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0);
    a.to_bits().abs_diff(b.to_bits())
}

fn graph_from(n: u32, edges: &[(u32, u32, u64)]) -> NetworkGraph {
    let links = edges
        .iter()
        .enumerate()
        .map(|(i, &(from, to, r))| Link {
            id: i as u64,
            from,
            to,
            capacity: r,
            residual: r,
        })
        .collect();
    NetworkGraph::new(n, links)
}

fn pair(i: u32, e: u32) -> IePair {
    IePair {
        ingress: i,
        egress: e,
        request_weight: 1.0,
    }
}

#[test]
fn equation_unit_vectors() {
    // Occurrence-rate criticality: the worked 3/5 fraction, exactly.
    let g = graph_from(
        7,
        &[
            (0, 1, 9),
            (1, 2, 9),
            (1, 3, 9),
            (1, 4, 9),
            (2, 6, 9),
            (3, 6, 9),
            (4, 6, 9),
            (0, 5, 9),
            (5, 6, 9),
            (0, 6, 9),
        ],
    );
    let table = build_criticality_table(&g, &[pair(0, 6)], &CatalogConfig::default()).unwrap();
    let exact_fraction = table.occurrences(0, 0) == 3
        && table.path_count(0) == 5
        && table.crit(0, 0) == 3.0 / 5.0
        && table.crit(0, 0) == 0.6;

    // Probability-weighted criticality over two pairs: crits (0.5, 1.0),
    // Laplace probabilities (0.25, 0.75), independently recomputed in
    // reverse summation order.
    let g2 = graph_from(5, &[(0, 1, 9), (1, 2, 9), (0, 3, 9), (3, 2, 9), (1, 4, 9)]);
    let ie2 = vec![pair(0, 2), pair(1, 2)];
    let table2 = build_criticality_table(&g2, &ie2, &CatalogConfig::default()).unwrap();
    let mut history2 = RoutingHistory::new(2, g2.link_count());
    history2.observe_request(1);
    history2.observe_request(1);
    let crit1 = teard_crit1(1, &table2, &history2);
    let independent_crit1: f64 = (0..2)
        .rev()
        .map(|p| table2.crit(p, 1) * history2.prob(p) * 100.0)
        .sum();
    let crit1_ok = ulp_diff(crit1, independent_crit1) <= 1 && crit1 == 87.5;

    // Usage ratio: (c - r) / r * 100 on the thick/thin capacity class.
    let link = Link {
        id: 0,
        from: 0,
        to: 1,
        capacity: 4800,
        residual: 1200,
    };
    let crit2 = teard_crit2(&link);
    let independent_crit2 = ((link.capacity - link.residual) * 100 / link.residual) as f64;
    let crit2_ok = crit2 == 300.0 && independent_crit2 == 300.0;

    // Established-path share: 4 of 10 -> 40.
    let mut history3 = RoutingHistory::new(1, 2);
    for i in 0..10 {
        history3.establish(&RoutePath::new(vec![usize::from(i >= 4)]));
    }
    let crit3_ok = teard_crit3(0, &history3) == 40.0;

    // Convex blend, re-associated.
    let params = TeardParams {
        k1: 0.3,
        k2: 0.4,
        k3: 0.3,
    };
    let parts = (50.0, 100.0, 10.0);
    let blend = params.k1 * parts.0 + params.k2 * parts.1 + params.k3 * parts.2;
    let independent_blend = params.k3 * parts.2 + (params.k2 * parts.1 + params.k1 * parts.0);
    let blend_ok = blend == 58.0 && ulp_diff(blend, independent_blend) <= 1;

    // Interference weight (sum of other-pair criticality) and the race
    // cost, evaluated directly.
    let g3 = graph_from(
        9,
        &[
            (0, 4, 10),
            (1, 4, 10),
            (4, 5, 10),
            (5, 6, 20),
            (2, 6, 10),
            (3, 4, 5),
            (3, 8, 40),
            (8, 6, 40),
        ],
    );
    let ie3 = vec![pair(0, 6), pair(1, 6), pair(2, 6), pair(3, 6)];
    let w = mira_weights(&g3, &ie3, 3, &[1.0; 4], 1e-6);
    let mira_ok = w[2] == 2.0 + 1e-6 && w[5] == 1e-6;

    let g4 = graph_from(3, &[(0, 1, 50), (1, 2, 30)]);
    let cost = rrate_path_cost(
        &RoutePath::new(vec![0, 1]),
        &[0, 0],
        &g4,
        10,
        &RrateParams {
            k1: 0.5,
            k2: 0.5,
            ..RrateParams::default()
        },
    );
    let rrate_ok = cost == PathCost::Finite(0.0125);

    let bgmra = te_sim_core::algo::bgmra_weights(&graph_from(2, &[(0, 1, 80)]), &[1.6], 1);
    let bgmra_ok = bgmra[0] == 0.02;

    let pass = exact_fraction
        && crit1_ok
        && crit2_ok
        && crit3_ok
        && blend_ok
        && mira_ok
        && rrate_ok
        && bgmra_ok;
    report(
        "equation-unit-vectors",
        pass,
        &format!(
            "3/5 exact: {exact_fraction}, crit1: {crit1_ok}, crit2: {crit2_ok}, crit3: {crit3_ok}, \
             blend: {blend_ok}, interference: {mira_ok}, race cost: {rrate_ok}, bgmra: {bgmra_ok}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: RRATE learning -> post-learning state machine
// ---------------------------------------------------------------------------

#[test]
fn rrate_state_machine() {
    // Two disjoint routes; k = 3 preselects both, N = 2.
    let g = graph_from(4, &[(0, 1, 100), (1, 3, 100), (0, 2, 40), (2, 3, 40)]);
    let ie = vec![pair(0, 3)];
    let params = RrateParams {
        k: 3,
        threshold: 2,
        ..RrateParams::default()
    };
    let candidates = CandidatePathSet::build(&g, &ie, params.k);
    let mut state = RrateState::new(&candidates, 1);

    let mut transition_at = None;
    let mut evals_at_transition = 0;
    for demand_no in 1..=5u32 {
        let (_, phase) = rrate_select(&mut state, &candidates, 0, &g, 5, &params, || {
            mira_critical_counts(&g, &ie)
        })
        .unwrap();
        if transition_at.is_none() && state.is_post_learning(0) {
            transition_at = Some(demand_no);
            evals_at_transition = state.cost_evaluations();
            assert_eq!(phase, RracePhase::Learning);
        }
    }
    // The winner's reward reaches N = 2 on the second demand, exactly.
    let transition_ok = transition_at == Some(2);
    // Post-learning performed zero further cost evaluations: the counter
    // froze at the transition (2 demands x 2 candidates evaluated).
    let evals_ok = state.cost_evaluations() == evals_at_transition && evals_at_transition == 4;
    let reward_ok = state.rewards(0).iter().max() == Some(&2);

    report(
        "rrate-state-machine",
        transition_ok && evals_ok && reward_ok,
        &format!(
            "transition at demand {transition_at:?} (expected 2), cost evaluations {} frozen after transition: {evals_ok}",
            state.cost_evaluations()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: moderation-parameter sweep stability on the reference scenario
// ---------------------------------------------------------------------------

#[test]
fn sweep_stability() {
    let started = Instant::now();
    let topo = load("cesnet.json");
    let trace = gen_demands(
        &WorkloadConfig {
            scenario: Scenario::Static,
            count: 1000,
            lambda: 0.0,
            mu: 0.0,
            seed: 7,
        },
        &topo.ie_pairs,
        &topo.bandwidth_menu,
    )
    .unwrap();
    let triples = triple_grid(0.1).unwrap();
    assert_eq!(triples.len(), 36);
    let rows = sweep_teard(
        &topo,
        &AlgorithmConfig::new(AlgorithmKind::Teard),
        &trace,
        &triples,
        &SimOptions::default(),
    )
    .unwrap();
    let max = rows.first().unwrap().acceptance_pct;
    let min = rows.last().unwrap().acceptance_pct;
    let spread = max - min;
    let elapsed = started.elapsed();
    report(
        "sweep-stability",
        spread <= 5.0 && elapsed.as_secs_f64() < 300.0,
        &format!(
            "36 triples, spread {spread:.2} points (max {max:.2}, min {min:.2}, limit 5) in {:.1}s (limit 300s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: directional reproduction across the three shipped topologies
// ---------------------------------------------------------------------------

#[test]
fn directional_reproduction() {
    let started = Instant::now();
    let cases = [
        ("mira.json", 40.0, 20.0),
        ("cesnet.json", 80.0, 30.0),
        ("ansnet.json", 60.0, 20.0),
    ];
    let seeds: Vec<u64> = (1..=10).collect();
    let configs: Vec<AlgorithmConfig> = AlgorithmKind::ALL
        .iter()
        .map(|&k| AlgorithmConfig::new(k))
        .collect();
    let mut all_pass = true;
    let mut details = Vec::new();
    for (file, lambda, mu) in cases {
        let topo = load(file);
        let runs = run_batch(&seeds, |&seed| {
            let trace = gen_demands(
                &WorkloadConfig {
                    scenario: Scenario::Dynamic,
                    count: 2000,
                    lambda,
                    mu,
                    seed,
                },
                &topo.ie_pairs,
                &topo.bandwidth_menu,
            )
            .unwrap();
            compare_algorithms(&topo, &configs, &trace, &SimOptions::default()).unwrap()
        });

        let mut acc: HashMap<AlgorithmKind, f64> = HashMap::new();
        let mut dur: HashMap<AlgorithmKind, f64> = HashMap::new();
        let mut learning_dur = 0.0;
        let mut first_100_ok = true;
        for entries in &runs {
            for e in entries {
                if e.result.acceptance_pct_at(100) != 100.0 {
                    first_100_ok = false;
                }
                *acc.entry(e.result.algorithm).or_default() += e.result.acceptance_pct();
                *dur.entry(e.result.algorithm).or_default() += e.result.mean_duration_ns;
                if let Some(r) = e.result.rrate {
                    learning_dur += r.learning_mean_ns;
                }
            }
        }
        let n = seeds.len() as f64;
        let mean = |k: AlgorithmKind| acc[&k] / n;
        let (teard, mha, mira, rrate) = (
            mean(AlgorithmKind::Teard),
            mean(AlgorithmKind::Mha),
            mean(AlgorithmKind::Mira),
            mean(AlgorithmKind::Rrate),
        );
        let teard_dur = dur[&AlgorithmKind::Teard] / n;
        let mira_dur = dur[&AlgorithmKind::Mira] / n;
        let learning = learning_dur / n;
        let acceptance_ok = teard >= mha && teard >= mira - 1.0 && teard >= rrate - 1.0;
        let duration_ok = teard_dur < mira_dur && teard_dur < learning;
        all_pass &= first_100_ok && acceptance_ok && duration_ok;
        details.push(format!(
            "{file}: first-100 {first_100_ok}, TEARD {teard:.2} vs MHA {mha:.2} / MIRA {mira:.2} / RRATE {rrate:.2}; \
             durations TEARD {:.1}us vs MIRA {:.1}us, RRATE-learning {:.1}us",
            teard_dur / 1e3,
            mira_dur / 1e3,
            learning / 1e3,
        ));
    }
    let elapsed = started.elapsed();
    all_pass &= elapsed.as_secs_f64() < 600.0;
    details.push(format!("{:.0}s (limit 600s)", elapsed.as_secs_f64()));
    report("directional-reproduction", all_pass, &details.join(" | "));
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical outputs modulo measured durations
// ---------------------------------------------------------------------------

fn run_command_set(out_root: &Path) {
    let topo = topo_path("mira.json");
    let topo = topo.to_str().unwrap();
    let trace = out_root.join("trace.csv");
    let steps: Vec<Vec<String>> = vec![
        vec![
            "gen-trace".into(),
            "--topo".into(),
            topo.into(),
            "--scenario".into(),
            "dynamic".into(),
            "--count".into(),
            "300".into(),
            "--lambda".into(),
            "40".into(),
            "--mu".into(),
            "20".into(),
            "--seed".into(),
            "13".into(),
            "--out".into(),
            trace.to_str().unwrap().into(),
        ],
        vec![
            "run".into(),
            "--topo".into(),
            topo.into(),
            "--algo".into(),
            "ALL".into(),
            "--trace".into(),
            trace.to_str().unwrap().into(),
            "--seed".into(),
            "13".into(),
            "--out".into(),
            out_root.join("run").to_str().unwrap().into(),
        ],
        vec![
            "sweep".into(),
            "--topo".into(),
            topo.into(),
            "--scenario".into(),
            "static".into(),
            "--count".into(),
            "300".into(),
            "--seed".into(),
            "13".into(),
            "--step".into(),
            "0.1".into(),
            "--out".into(),
            out_root.join("sweep").to_str().unwrap().into(),
        ],
    ];
    for args in steps {
        let out = Command::new(env!("CARGO_BIN_EXE_te-sim"))
            .args(&args)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

/// Strips measured durations: the `duration_ns` CSV column and every JSON
/// field whose key ends in `_ns`.
fn normalized(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
            fn scrub(v: &mut serde_json::Value) {
                match v {
                    serde_json::Value::Object(map) => {
                        map.retain(|k, _| !k.ends_with("_ns"));
                        map.values_mut().for_each(scrub);
                    }
                    serde_json::Value::Array(items) => items.iter_mut().for_each(scrub),
                    _ => {}
                }
            }
            scrub(&mut value);
            value.to_string()
        }
        _ => {
            let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
            if lines.first().is_some_and(|h| h.ends_with(",duration_ns")) {
                for line in &mut lines {
                    *line = line.rsplit_once(',').unwrap().0.to_string();
                }
            }
            lines.join("\n")
        }
    }
}

#[test]
fn determinism_of_command_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // Literally identical invocations: same command lines, same paths,
    // executed twice with the outputs set aside in between.
    let work = dir.path().join("work");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_command_set(&work);
    fs::rename(&work, &a).unwrap();
    run_command_set(&work);
    fs::rename(&work, &b).unwrap();

    let mut compared = 0;
    let mut walk = |sub: &str| {
        let dir_a = a.join(sub);
        let mut names: Vec<String> = fs::read_dir(&dir_a)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        for name in names {
            let left = normalized(&dir_a.join(&name));
            let right = normalized(&b.join(sub).join(&name));
            assert_eq!(left, right, "{sub}/{name} differs between identical runs");
            compared += 1;
        }
    };
    // The generated trace must match byte for byte (no duration fields).
    assert_eq!(
        fs::read(a.join("trace.csv")).unwrap(),
        fs::read(b.join("trace.csv")).unwrap()
    );
    walk("run");
    walk("sweep");
    report(
        "determinism",
        compared > 0,
        &format!(
            "trace byte-identical; {compared} output files identical after dropping *_ns fields"
        ),
    );
}
