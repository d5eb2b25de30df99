//! `te-sim`: validate topologies, generate demand traces, run bandwidth-
//! guaranteed routing simulations, and sweep TEARD moderation parameters.
//!
//! Option precedence everywhere: command-line flag, then `--config` file
//! field, then (for the seed) the `TE_SIM_SEED` environment variable, then
//! the built-in default. Outputs are written atomically (temp file +
//! rename); on failure the partial outputs of the invocation are removed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use te_sim_core::algo::{
    AlgorithmConfig, AlgorithmKind, MiraParams, ResidualMode, RrateParams, TeardParams,
};
use te_sim_core::catalog::{build_criticality_table, CatalogConfig, CriticalityTable};
use te_sim_core::net::{load_topology, Demand, Topology};
use te_sim_core::report::{write_demand_csv, write_sweep_csv, ComparisonReport, RunSummary};
use te_sim_core::sim::{
    compare_algorithms_cached, sweep_teard, triple_grid, PathCounting, ProbCounting, SimOptions,
};
use te_sim_core::workload::{gen_demands, load_trace, save_trace, Scenario, WorkloadConfig};

#[derive(Parser)]
#[command(
    name = "te-sim",
    version,
    about = "Bandwidth-guaranteed TE routing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a topology file and report per-pair path statistics.
    Validate(ValidateArgs),
    /// Simulate a demand trace under one or more algorithms.
    Run(RunArgs),
    /// Run the TEARD moderation-parameter sweep.
    Sweep(SweepArgs),
    /// Generate a demand trace file.
    GenTrace(GenTraceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Topology file (JSON).
    #[arg(long)]
    topo: Option<PathBuf>,
    /// Run-configuration file supplying defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (fallback: TE_SIM_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Enumeration slack over each pair's shortest-hop distance.
    #[arg(long)]
    slack: Option<u32>,
    /// Per-pair enumerated-path cap before the offline build fails.
    #[arg(long)]
    path_cap: Option<usize>,
}

#[derive(Args)]
struct WorkloadArgs {
    /// static or dynamic.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Number of demands (default 1000 static, 2000 dynamic).
    #[arg(long)]
    count: Option<usize>,
    /// Poisson arrival rate (dynamic).
    #[arg(long)]
    lambda: Option<f64>,
    /// Mean exponential holding time (dynamic).
    #[arg(long)]
    mu: Option<f64>,
    /// Replay this trace file instead of generating one.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write (or refresh) the criticality-table cache at this path.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Algorithm name, comma list, or ALL.
    #[arg(long)]
    algo: Option<String>,
    /// Output directory for demands.csv / summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sliding window length for the acceptance series.
    #[arg(long)]
    window: Option<usize>,
    /// Demands between window evaluations.
    #[arg(long)]
    stride: Option<usize>,
    /// Worker threads for independent runs (requires the parallel build).
    #[arg(long)]
    jobs: Option<usize>,
    /// Criticality cache file to reuse (rebuilt and rewritten when stale).
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Moderation grid step (0.1 gives the canonical 36 triples).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GenTraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Trace file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Optional fields of the `--config` document; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigDoc {
    topology: Option<PathBuf>,
    algorithm: Option<String>,
    teard: Option<TeardParams>,
    rrate: Option<RrateParams>,
    mira: Option<MiraParams>,
    rrate_residual: Option<ResidualMode>,
    scenario: Option<Scenario>,
    count: Option<usize>,
    lambda: Option<f64>,
    mu: Option<f64>,
    trace: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    window: Option<usize>,
    stride: Option<usize>,
    jobs: Option<usize>,
    slack: Option<u32>,
    path_cap: Option<usize>,
    step: Option<f64>,
    prob_counting: Option<ProbCounting>,
    path_counting: Option<PathCounting>,
}

impl ConfigDoc {
    fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("cannot read config file {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("cannot parse config file {}", p.display()))
            }
        }
    }
}

fn main() {
    // Die quietly when stdout is closed early (validate ... | head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::GenTrace(args) => cmd_gen_trace(args),
    }
}

// ---------------------------------------------------------------------------
// Option resolution
// ---------------------------------------------------------------------------

fn resolve_seed(flag: Option<u64>, cfg: &ConfigDoc) -> u64 {
    flag.or(cfg.seed)
        .or_else(|| {
            std::env::var("TE_SIM_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn resolve_topology(common: &CommonArgs, cfg: &ConfigDoc) -> Result<(PathBuf, Topology)> {
    let path = common
        .topo
        .clone()
        .or_else(|| cfg.topology.clone())
        .ok_or_else(|| anyhow!("no topology given (use --topo or the config file)"))?;
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read topology file {}", path.display()))?;
    let topo =
        load_topology(&text).with_context(|| format!("invalid topology {}", path.display()))?;
    Ok((path, topo))
}

fn resolve_catalog(common: &CommonArgs, cfg: &ConfigDoc) -> CatalogConfig {
    let defaults = CatalogConfig::default();
    CatalogConfig {
        slack: common.slack.or(cfg.slack).unwrap_or(defaults.slack),
        path_cap: common
            .path_cap
            .or(cfg.path_cap)
            .unwrap_or(defaults.path_cap),
    }
}

fn resolve_algorithms(flag: Option<&str>, cfg: &ConfigDoc) -> Result<Vec<AlgorithmConfig>> {
    let chosen = flag
        .map(str::to_string)
        .or_else(|| cfg.algorithm.clone())
        .unwrap_or_else(|| "TEARD".to_string());
    let mut kinds = Vec::new();
    for name in chosen.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name.eq_ignore_ascii_case("ALL") {
            kinds.extend(AlgorithmKind::ALL);
        } else {
            kinds.push(name.parse()?);
        }
    }
    if kinds.is_empty() {
        bail!("no algorithm selected");
    }
    let mut rrate = cfg.rrate.clone().unwrap_or_default();
    if let Some(mode) = cfg.rrate_residual {
        rrate.residual_mode = mode;
    }
    let configs = kinds
        .into_iter()
        .map(|kind| {
            let c = AlgorithmConfig {
                algorithm: kind,
                teard: cfg.teard.unwrap_or_default(),
                rrate: rrate.clone(),
                mira: cfg.mira.clone().unwrap_or_default(),
            };
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(configs)
}

fn resolve_sim_options(
    window: Option<usize>,
    stride: Option<usize>,
    common: &CommonArgs,
    cfg: &ConfigDoc,
) -> SimOptions {
    let defaults = SimOptions::default();
    SimOptions {
        window: window.or(cfg.window).unwrap_or(defaults.window),
        stride: stride.or(cfg.stride).unwrap_or(defaults.stride),
        prob_counting: cfg.prob_counting.unwrap_or_default(),
        path_counting: cfg.path_counting.unwrap_or_default(),
        catalog: resolve_catalog(common, cfg),
    }
}

/// Either replays `--trace` or generates a seeded workload.
fn resolve_trace(
    args: &WorkloadArgs,
    cfg: &ConfigDoc,
    topo: &Topology,
    seed: u64,
) -> Result<(Vec<Demand>, Option<WorkloadConfig>, Option<String>)> {
    if let Some(path) = args.trace.clone().or_else(|| cfg.trace.clone()) {
        let file = fs::File::open(&path)
            .with_context(|| format!("cannot open trace file {}", path.display()))?;
        let trace =
            load_trace(file).with_context(|| format!("invalid trace file {}", path.display()))?;
        return Ok((trace, None, Some(path.display().to_string())));
    }
    let scenario = args.scenario.or(cfg.scenario).unwrap_or(Scenario::Static);
    let mut wl = WorkloadConfig::new(scenario, seed);
    if let Some(count) = args.count.or(cfg.count) {
        wl.count = count;
    }
    if let Some(lambda) = args.lambda.or(cfg.lambda) {
        wl.lambda = lambda;
    }
    if let Some(mu) = args.mu.or(cfg.mu) {
        wl.mu = mu;
    }
    let trace = gen_demands(&wl, &topo.ie_pairs, &topo.bandwidth_menu)?;
    Ok((trace, Some(wl), None))
}

fn configure_jobs(jobs: Option<usize>, cfg: &ConfigDoc) -> Result<()> {
    let Some(n) = jobs.or(cfg.jobs) else {
        return Ok(());
    };
    if n == 0 {
        bail!("--jobs must be at least 1");
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the worker pool")?;
        Ok(())
    }
    #[cfg(not(feature = "parallel"))]
    {
        if n > 1 {
            eprintln!("note: built without the parallel feature; running sequentially");
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Atomic output writing
// ---------------------------------------------------------------------------

/// Collects files written by one invocation so failures can clean them up.
struct OutputSet {
    written: Vec<PathBuf>,
}

impl OutputSet {
    fn new() -> Self {
        Self {
            written: Vec::new(),
        }
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create directory {}", dir.display()))?;
            }
        }
        let tmp = path.with_extension(format!(
            "{}.tmp-{}",
            path.extension().and_then(|e| e.to_str()).unwrap_or(""),
            std::process::id()
        ));
        fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", tmp.display()))?;
        fs::rename(&tmp, path)
            .with_context(|| format!("cannot move {} into place", tmp.display()))?;
        self.written.push(path.to_path_buf());
        println!("wrote {}", path.display());
        Ok(())
    }

    fn discard_all(&mut self) {
        for path in self.written.drain(..) {
            let _ = fs::remove_file(&path);
        }
    }
}

/// Runs `f`; on error removes every file it managed to write.
fn with_outputs(f: impl FnOnce(&mut OutputSet) -> Result<()>) -> Result<()> {
    let mut outputs = OutputSet::new();
    match f(&mut outputs) {
        Ok(()) => Ok(()),
        Err(e) => {
            outputs.discard_all();
            Err(e)
        }
    }
}

fn ms(ns: f64) -> f64 {
    ns / 1e6
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let cfg = ConfigDoc::load(args.common.config.as_deref())?;
    let (path, topo) = resolve_topology(&args.common, &cfg)?;
    let catalog = resolve_catalog(&args.common, &cfg);
    println!(
        "topology {}: {} nodes, {} directed links, {} ie pairs, menu {:?}",
        path.display(),
        topo.graph.node_count(),
        topo.graph.link_count(),
        topo.ie_pairs.len(),
        topo.bandwidth_menu,
    );
    let table = build_criticality_table(&topo.graph, &topo.ie_pairs, &catalog)?;
    for (i, pair) in topo.ie_pairs.iter().enumerate() {
        let count = table.path_count(i);
        println!(
            "pair ({}, {}): connected, {count} paths within {} hops",
            pair.ingress,
            pair.egress,
            table.hop_limit(i),
        );
        if count as usize * 10 >= catalog.path_cap * 9 {
            println!(
                "  warning: pair ({}, {}) is near the {}-path cap; consider lowering --slack",
                pair.ingress, pair.egress, catalog.path_cap
            );
        }
    }
    println!(
        "criticality table ok (slack {}, key {})",
        catalog.slack,
        &table.key()[..16],
    );
    if let Some(cache) = args.cache {
        with_outputs(|out| out.write(&cache, table.to_cache_json(&topo.graph).as_bytes()))?;
    }
    Ok(())
}

/// Loads a matching cached table or builds and (re)writes the cache.
fn load_or_build_table(
    cache: Option<&Path>,
    topo: &Topology,
    catalog: &CatalogConfig,
    outputs: &mut OutputSet,
) -> Result<Option<CriticalityTable>> {
    let Some(path) = cache else {
        return Ok(None);
    };
    if let Ok(text) = fs::read_to_string(path) {
        if let Ok(table) =
            CriticalityTable::from_cache_json(&text, &topo.graph, &topo.ie_pairs, catalog)
        {
            println!("loaded criticality cache {}", path.display());
            return Ok(Some(table));
        }
        println!("criticality cache {} is stale; rebuilding", path.display());
    }
    let table = build_criticality_table(&topo.graph, &topo.ie_pairs, catalog)?;
    outputs.write(path, table.to_cache_json(&topo.graph).as_bytes())?;
    Ok(Some(table))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = ConfigDoc::load(args.common.config.as_deref())?;
    configure_jobs(args.jobs, &cfg)?;
    let (_path, topo) = resolve_topology(&args.common, &cfg)?;
    let seed = resolve_seed(args.common.seed, &cfg);
    let algos = resolve_algorithms(args.algo.as_deref(), &cfg)?;
    let opts = resolve_sim_options(args.window, args.stride, &args.common, &cfg);
    let (trace, workload, trace_file) = resolve_trace(&args.workload, &cfg, &topo, seed)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let topology_hash = topo.content_hash();

    with_outputs(|outputs| {
        let cached = load_or_build_table(args.cache.as_deref(), &topo, &opts.catalog, outputs)?;
        let entries = compare_algorithms_cached(&topo, &algos, &trace, &opts, cached)?;

        let single = entries.len() == 1;
        for (entry, algo_cfg) in entries.iter().zip(&algos) {
            let r = &entry.result;
            println!(
                "{}: acceptance {:.2}% ({}/{}), mean handling {:.3} ms",
                r.algorithm,
                r.acceptance_pct(),
                r.accepted,
                r.records.len(),
                ms(r.mean_duration_ns),
            );
            let suffix = if single {
                String::new()
            } else {
                format!("_{}", r.algorithm.name())
            };
            let mut csv_buf = Vec::new();
            write_demand_csv(r, &mut csv_buf)?;
            outputs.write(&out_dir.join(format!("demands{suffix}.csv")), &csv_buf)?;
            let mut summary =
                RunSummary::new(r, algo_cfg, opts.window, opts.stride, seed, &topology_hash);
            summary.workload = workload.clone();
            summary.trace_file = trace_file.clone();
            outputs.write(
                &out_dir.join(format!("summary{suffix}.json")),
                summary.to_json().as_bytes(),
            )?;
        }

        if !single {
            print_comparison_table(&entries);
            let report = ComparisonReport::new(&entries, seed, &topology_hash);
            outputs.write(
                &out_dir.join("comparison.json"),
                report.to_json().as_bytes(),
            )?;
        }
        Ok(())
    })
}

/// Table-style stdout summary: per-NoD "ratio - time(ms)" per algorithm.
fn print_comparison_table(entries: &[te_sim_core::sim::ComparisonEntry]) {
    let Some(first) = entries.first() else {
        return;
    };
    print!("{:>6}", "NoD");
    for e in entries {
        print!("{:>18}", e.result.algorithm.name());
    }
    println!();
    for (row, cp) in first.checkpoints.iter().enumerate() {
        print!("{:>6}", cp.nod);
        for e in entries {
            let c = &e.checkpoints[row];
            print!(
                "{:>18}",
                format!("{:.2}-{:.2}", c.acceptance_pct, ms(c.mean_duration_ns))
            );
        }
        println!();
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = ConfigDoc::load(args.common.config.as_deref())?;
    configure_jobs(args.jobs, &cfg)?;
    let (_path, topo) = resolve_topology(&args.common, &cfg)?;
    let seed = resolve_seed(args.common.seed, &cfg);
    let opts = resolve_sim_options(args.window, args.stride, &args.common, &cfg);
    let (trace, _workload, _trace_file) = resolve_trace(&args.workload, &cfg, &topo, seed)?;
    let step = args.step.or(cfg.step).unwrap_or(0.1);
    let triples = triple_grid(step)?;
    let base = AlgorithmConfig {
        algorithm: AlgorithmKind::Teard,
        teard: cfg.teard.unwrap_or_default(),
        rrate: cfg.rrate.clone().unwrap_or_default(),
        mira: cfg.mira.clone().unwrap_or_default(),
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let started = Instant::now();
    let rows = sweep_teard(&topo, &base, &trace, &triples, &opts)?;
    let elapsed = started.elapsed();

    let max = rows.first().map(|r| r.acceptance_pct).unwrap_or(0.0);
    let min = rows.last().map(|r| r.acceptance_pct).unwrap_or(0.0);
    println!(
        "{} triples over {} demands in {:.1}s; acceptance spread {:.2} points (max {:.2}, min {:.2})",
        rows.len(),
        trace.len(),
        elapsed.as_secs_f64(),
        max - min,
        max,
        min,
    );
    let show = |r: &te_sim_core::sim::SweepRow| {
        println!(
            "  k1={:<4} k2={:<4} k3={:<4} {:>6.2}%",
            r.k1, r.k2, r.k3, r.acceptance_pct
        )
    };
    println!("top 3:");
    rows.iter().take(3).for_each(show);
    println!("bottom 3:");
    rows.iter().rev().take(3).rev().for_each(show);

    with_outputs(|outputs| {
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf)?;
        outputs.write(&out_dir.join("sweep.csv"), &buf)
    })
}

fn cmd_gen_trace(args: GenTraceArgs) -> Result<()> {
    let cfg = ConfigDoc::load(args.common.config.as_deref())?;
    let (_path, topo) = resolve_topology(&args.common, &cfg)?;
    let seed = resolve_seed(args.common.seed, &cfg);
    if args.workload.trace.is_some() {
        bail!("gen-trace generates a trace; --trace is not applicable");
    }
    let (trace, _workload, _file) = resolve_trace(&args.workload, &cfg, &topo, seed)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| anyhow!("gen-trace needs --out FILE"))?;
    with_outputs(|outputs| {
        let mut buf = Vec::new();
        save_trace(&trace, &mut buf)?;
        outputs.write(&out, &buf)
    })?;
    println!("generated {} demands (seed {seed})", trace.len());
    Ok(())
}
