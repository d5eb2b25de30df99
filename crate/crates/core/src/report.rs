//! Result serialization: per-demand CSV, run summaries (JSON), sweep tables
//!and comparison reports.
//!
//! Every field except the measured durations is reproducible for a given
//! (topology, config, trace, seed); consumers that diff outputs should skip
//! `duration_ns` / `*_duration_*` fields and nothing else.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algo::AlgorithmConfig;
use crate::sim::{Checkpoint, ComparisonEntry, RrateSummary, SimResult, SweepRow, WindowPoint};
use crate::workload::WorkloadConfig;

/// Host facts attached to summaries, since absolute timings are
/// hardware-dependent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentInfo {
    pub os: String,
    pub arch: String,
    pub cpus: usize,
}

impl EnvironmentInfo {
    pub fn current() -> Self {
        Self {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Summary document written next to the per-demand CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub acceptance_pct: f64,
    pub accepted: u64,
    pub rejected: u64,
    pub total: u64,
    /// Measured; excluded from determinism comparisons.
    pub mean_duration_ns: f64,
    pub window: usize,
    pub stride: usize,
    pub windowed: Vec<WindowPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rrate: Option<RrateSummary>,
    pub config: AlgorithmConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workload: Option<WorkloadConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
    pub seed: u64,
    pub topology_hash: String,
    pub environment: EnvironmentInfo,
}

impl RunSummary {
    pub fn new(
        result: &SimResult,
        config: &AlgorithmConfig,
        window: usize,
        stride: usize,
        seed: u64,
        topology_hash: &str,
    ) -> Self {
        Self {
            algorithm: result.algorithm.name().to_string(),
            acceptance_pct: result.acceptance_pct(),
            accepted: result.accepted,
            rejected: result.rejected,
            total: result.records.len() as u64,
            mean_duration_ns: result.mean_duration_ns,
            window,
            stride,
            windowed: result.windowed.clone(),
            rrate: result.rrate,
            config: config.clone(),
            workload: None,
            trace_file: None,
            seed,
            topology_hash: topology_hash.to_string(),
            environment: EnvironmentInfo::current(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialization cannot fail")
    }
}

/// Writes `demand_id,outcome,path_nodes,weight_total,duration_ns` rows.
///
/// `path_nodes` is dash-joined; `weight_total` is empty for rejections and
/// for RRATE (which selects paths without link weights).
pub fn write_demand_csv<W: Write>(result: &SimResult, writer: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "demand_id",
        "outcome",
        "path_nodes",
        "weight_total",
        "duration_ns",
    ])?;
    for r in &result.records {
        out.write_record([
            r.id.to_string(),
            if r.accepted { "accepted" } else { "rejected" }.to_string(),
            r.path_nodes.as_ref().map_or_else(String::new, |nodes| {
                nodes
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join("-")
            }),
            r.weight_total.map_or_else(String::new, |w| w.to_string()),
            r.duration_ns.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the sweep table: `k1,k2,k3,acceptance`, already sorted descending.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["k1", "k2", "k3", "acceptance"])?;
    for r in rows {
        out.write_record([
            r.k1.to_string(),
            r.k2.to_string(),
            r.k3.to_string(),
            r.acceptance_pct.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonSummaryEntry {
    pub algorithm: String,
    pub acceptance_pct: f64,
    /// Measured; excluded from determinism comparisons.
    pub mean_duration_ns: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub windowed: Vec<WindowPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rrate: Option<RrateSummary>,
}

/// Comparison report document: one entry per algorithm over one trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub entries: Vec<ComparisonSummaryEntry>,
    pub seed: u64,
    pub topology_hash: String,
    pub environment: EnvironmentInfo,
}

impl ComparisonReport {
    pub fn new(entries: &[ComparisonEntry], seed: u64, topology_hash: &str) -> Self {
        Self {
            entries: entries
                .iter()
                .map(|e| ComparisonSummaryEntry {
                    algorithm: e.result.algorithm.name().to_string(),
                    acceptance_pct: e.result.acceptance_pct(),
                    mean_duration_ns: e.result.mean_duration_ns,
                    checkpoints: e.checkpoints.clone(),
                    windowed: e.result.windowed.clone(),
                    rrate: e.result.rrate,
                })
                .collect(),
            seed,
            topology_hash: topology_hash.to_string(),
            environment: EnvironmentInfo::current(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
