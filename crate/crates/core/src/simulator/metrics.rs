//! Per-policy experiment metrics: success rates, lap-time statistics over
//! successful episodes only, and planner-usage distributions.

use super::{CrashCause, EpisodeResult};
use crate::planners::PlannerKind;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

/// Metrics of one policy over a set of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetrics {
    pub policy: String,
    pub episodes: usize,
    pub successes: usize,
    /// Percent of episodes completed without crash or timeout.
    pub success_rate: f64,
    /// Mean lap time over successful episodes only; absent when none
    /// succeeded.
    pub lap_mean: Option<f64>,
    /// Sample standard deviation of successful lap times; absent when none
    /// succeeded, zero for a single success.
    pub lap_std: Option<f64>,
    /// Share of planning decisions per planner, percent, summing to 100 for
    /// any policy that made at least one decision.
    pub usage_percent: [f64; 5],
    pub gate_strikes: usize,
    pub out_of_bounds: usize,
    pub timeouts: usize,
}

/// Aggregates episode results into policy metrics.
///
/// Lap-time statistics are computed over successful episodes only, so adding
/// a crashed episode changes the success rate but never the lap-time mean.
pub fn summarize(policy: &str, episodes: &[EpisodeResult]) -> PolicyMetrics {
    let n = episodes.len();
    let laps: Vec<f64> = episodes.iter().filter_map(|e| e.lap_time).collect();
    let successes = laps.len();

    let (lap_mean, lap_std) = if laps.is_empty() {
        (None, None)
    } else {
        let mean = laps.iter().sum::<f64>() / laps.len() as f64;
        let std = if laps.len() >= 2 {
            let var =
                laps.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (laps.len() - 1) as f64;
            var.sqrt()
        } else {
            0.0
        };
        (Some(mean), Some(std))
    };

    let mut usage = [0u64; 5];
    for e in episodes {
        for (slot, &count) in usage.iter_mut().zip(e.planner_usage.iter()) {
            *slot += count as u64;
        }
    }
    let total: u64 = usage.iter().sum();
    let mut usage_percent = [0.0; 5];
    if total > 0 {
        for (pct, &count) in usage_percent.iter_mut().zip(usage.iter()) {
            *pct = 100.0 * count as f64 / total as f64;
        }
    }

    let count_cause = |cause: CrashCause| episodes.iter().filter(|e| e.crash_cause == cause).count();

    PolicyMetrics {
        policy: policy.to_string(),
        episodes: n,
        successes,
        success_rate: if n > 0 { 100.0 * successes as f64 / n as f64 } else { 0.0 },
        lap_mean,
        lap_std,
        usage_percent,
        gate_strikes: count_cause(CrashCause::GateStrike),
        out_of_bounds: count_cause(CrashCause::OutOfBounds),
        timeouts: count_cause(CrashCause::Timeout),
    }
}

/// Full experiment output: the metrics table plus the raw per-policy episode
/// results (index-aligned with `rows`).
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<PolicyMetrics>,
    pub episodes: Vec<Vec<EpisodeResult>>,
}

impl ExperimentResult {
    pub fn metrics_for(&self, policy: &str) -> Option<&PolicyMetrics> {
        self.rows.iter().find(|r| r.policy == policy)
    }

    pub fn episodes_for(&self, policy: &str) -> Option<&[EpisodeResult]> {
        self.rows
            .iter()
            .position(|r| r.policy == policy)
            .map(|i| self.episodes[i].as_slice())
    }
}

/// Writes the metrics table as CSV; absent lap statistics stay empty rather
/// than zero.
pub fn write_metrics_csv<W: Write>(rows: &[PolicyMetrics], out: &mut W) -> io::Result<()> {
    write!(out, "policy,episodes,successes,success_rate,lap_mean,lap_std")?;
    for kind in PlannerKind::ALL {
        write!(out, ",usage_{}", kind.name())?;
    }
    writeln!(out, ",gate_strikes,out_of_bounds,timeouts")?;
    for r in rows {
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        write!(
            out,
            "{},{},{},{},{},{}",
            r.policy,
            r.episodes,
            r.successes,
            r.success_rate,
            fmt_opt(r.lap_mean),
            fmt_opt(r.lap_std)
        )?;
        for pct in r.usage_percent {
            write!(out, ",{pct}")?;
        }
        writeln!(out, ",{},{},{}", r.gate_strikes, r.out_of_bounds, r.timeouts)?;
    }
    Ok(())
}
