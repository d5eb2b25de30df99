//! Seeded demand-trace generation and trace file I/O.
//!
//! Traces are bit-reproducible: demand `j` takes its draws from the
//! counter-based stream at fixed offsets (pair at `4j`, bandwidth at
//! `4j + 1`, inter-arrival at `4j + 2`, holding time at `4j + 3`), so the
//! static scenario simply leaves the last two counters unused and the same
//! seed always yields the same trace, on any platform.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Demand, IePair};
use crate::rng::CounterRng;
use crate::time::{format_time, parse_time, units_to_ticks, SimTime, TICKS_PER_UNIT};

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("workload config error: {0}")]
    Config(String),
    #[error("trace parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("trace io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Demand arrival/holding pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Unit-spaced arrivals, bandwidth held forever.
    Static,
    /// Poisson arrivals (rate `lambda`), exponential holding (mean `mu`).
    Dynamic,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Static => "static",
            Scenario::Dynamic => "dynamic",
        })
    }
}

impl std::str::FromStr for Scenario {
    type Err = WorkloadError;

    fn from_str(s: &str) -> Result<Self, WorkloadError> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(Scenario::Static),
            "dynamic" => Ok(Scenario::Dynamic),
            other => Err(WorkloadError::Config(format!(
                "unknown scenario {other:?} (expected static or dynamic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub scenario: Scenario,
    pub count: usize,
    /// Poisson arrival rate (demands per time unit); dynamic only.
    pub lambda: f64,
    /// Mean exponential holding time (time units); dynamic only.
    pub mu: f64,
    pub seed: u64,
}

impl WorkloadConfig {
    /// Canonical demand counts: 1000 static or 2000 dynamic.
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            count: match scenario {
                Scenario::Static => 1000,
                Scenario::Dynamic => 2000,
            },
            lambda: 40.0,
            mu: 20.0,
            seed,
        }
    }

    fn validate(&self, ie: &[IePair], menu: &[u64]) -> Result<(), WorkloadError> {
        if menu.is_empty() {
            return Err(WorkloadError::Config("bandwidth menu is empty".into()));
        }
        let total: f64 = ie.iter().map(|p| p.request_weight).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(WorkloadError::Config(
                "ie request weights sum to zero".into(),
            ));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.scenario == Scenario::Dynamic && !(positive(self.lambda) && positive(self.mu)) {
            return Err(WorkloadError::Config(format!(
                "dynamic scenario needs positive lambda and mu (got {}, {})",
                self.lambda, self.mu
            )));
        }
        Ok(())
    }
}

/// Generates the demand trace for a topology's IE set and bandwidth menu.
///
/// Pairs are drawn by normalized request weight and bandwidths uniformly
/// from the menu. Static arrivals sit at 0, 1, 2, ... time units and never
/// depart; dynamic arrivals accumulate exponential inter-arrival gaps
/// (mean `1/lambda`) with exponential holding times (mean `mu`). Arrival
/// times are strictly increasing: a gap that rounds to zero ticks is
/// replaced by the demand's index in ticks.
pub fn gen_demands(
    config: &WorkloadConfig,
    ie: &[IePair],
    menu: &[u64],
) -> Result<Vec<Demand>, WorkloadError> {
    config.validate(ie, menu)?;
    let rng = CounterRng::new(config.seed);
    let weights: Vec<f64> = ie.iter().map(|p| p.request_weight).collect();
    let mut demands = Vec::with_capacity(config.count);
    let mut clock: SimTime = 0;
    for j in 0..config.count as u64 {
        let pair = &ie[rng.weighted_index(4 * j, &weights)];
        let bandwidth = menu[rng.index(4 * j + 1, menu.len())];
        let (arrival, holding) = match config.scenario {
            Scenario::Static => (j * TICKS_PER_UNIT, None),
            Scenario::Dynamic => {
                let gap = units_to_ticks(rng.exponential(4 * j + 2, 1.0 / config.lambda));
                let arrival = if j == 0 {
                    gap
                } else if gap == 0 {
                    clock + j
                } else {
                    clock + gap
                };
                clock = arrival;
                let holding = units_to_ticks(rng.exponential(4 * j + 3, config.mu)).max(1);
                (arrival, Some(holding))
            }
        };
        demands.push(Demand {
            id: j,
            ingress: pair.ingress,
            egress: pair.egress,
            bandwidth,
            arrival,
            holding,
        });
    }
    Ok(demands)
}

const TRACE_HEADER: [&str; 6] = [
    "id",
    "arrival_time",
    "ingress",
    "egress",
    "bandwidth",
    "holding_time",
];

/// Writes a trace as CSV (times in fixed-point units, `inf` for static holds).
pub fn save_trace<W: Write>(trace: &[Demand], writer: W) -> Result<(), WorkloadError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(TRACE_HEADER)?;
    for d in trace {
        out.write_record([
            d.id.to_string(),
            format_time(d.arrival),
            d.ingress.to_string(),
            d.egress.to_string(),
            d.bandwidth.to_string(),
            d.holding.map_or_else(|| "inf".to_string(), format_time),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a trace written by [`save_trace`].
pub fn load_trace<R: Read>(reader: R) -> Result<Vec<Demand>, WorkloadError> {
    let mut input = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(reader);
    let mut trace = Vec::new();
    for (i, record) in input.records().enumerate() {
        let line = i as u64 + 1;
        let record = record?;
        if i == 0 {
            if record.iter().ne(TRACE_HEADER) {
                return Err(WorkloadError::Parse {
                    line,
                    message: format!("bad header {:?}", record.iter().collect::<Vec<_>>()),
                });
            }
            continue;
        }
        let field = |idx: usize, name: &str| -> Result<&str, WorkloadError> {
            record.get(idx).ok_or_else(|| WorkloadError::Parse {
                line,
                message: format!("missing column {name}"),
            })
        };
        let parse_err = |name: &str, value: &str| WorkloadError::Parse {
            line,
            message: format!("bad {name} {value:?}"),
        };
        let id: u64 = field(0, "id")?
            .parse()
            .map_err(|_| parse_err("id", field(0, "id").unwrap()))?;
        let arrival = parse_time(field(1, "arrival_time")?)
            .ok_or_else(|| parse_err("arrival_time", field(1, "arrival_time").unwrap()))?;
        let ingress: u32 = field(2, "ingress")?
            .parse()
            .map_err(|_| parse_err("ingress", field(2, "ingress").unwrap()))?;
        let egress: u32 = field(3, "egress")?
            .parse()
            .map_err(|_| parse_err("egress", field(3, "egress").unwrap()))?;
        let bandwidth_text = field(4, "bandwidth")?;
        let bandwidth: u64 = bandwidth_text
            .parse()
            .map_err(|_| parse_err("bandwidth", bandwidth_text))?;
        if bandwidth == 0 {
            return Err(parse_err("bandwidth", bandwidth_text));
        }
        let holding_text = field(5, "holding_time")?;
        let holding = if holding_text == "inf" {
            None
        } else {
            Some(parse_time(holding_text).ok_or_else(|| parse_err("holding_time", holding_text))?)
        };
        trace.push(Demand {
            id,
            ingress,
            egress,
            bandwidth,
            arrival,
            holding,
        });
    }
    Ok(trace)
}
