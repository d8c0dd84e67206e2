//! Complexity formulas, speedup estimates, the linear cost model and
//! per-run statistics.

mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::harness::Mode;
use crate::sim::Attribution;

pub use report::{render_report, Report, ReportError};

/// Uclock frequency used to turn cycle ratios into frequencies (a label,
/// not something the model measures).
pub const DEFAULT_SYSTEM_FREQUENCY_HZ: f64 = 8.33e6;

/// Simulation clock label; has no effect in a zero-delay model.
pub const SIMULATION_CLOCK_HZ: f64 = 100e6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("chain length {0} outside 1..=62")]
    ChainLength(u32),
    #[error("testbench fraction {0} outside the allowed range")]
    Fraction(f64),
    #[error("no uncontrolled clocks recorded")]
    NoUclocks,
    #[error("cost model coefficient `{0}` is negative or not finite")]
    Coefficient(&'static str),
}

/// Clock cycles for a full scan test of an n-flop chain: every one of the
/// 2ⁿ vectors takes n shifts and one capture, plus n shifts to drain the
/// last response.
pub fn scan_complexity(n: u32) -> Result<u128, MetricsError> {
    if !(1..=62).contains(&n) {
        return Err(MetricsError::ChainLength(n));
    }
    Ok((1u128 << n) * (n as u128 + 1) + n as u128)
}

/// Cycles left in the testbench when `tb_fraction` of the work stays there.
pub fn workload_split(total_cycles: u64, tb_fraction: f64) -> Result<u64, MetricsError> {
    if !(0.0..=1.0).contains(&tb_fraction) {
        return Err(MetricsError::Fraction(tb_fraction));
    }
    Ok((total_cycles as f64 * tb_fraction).round() as u64)
}

/// Speedup bound when everything but the testbench share is made free.
pub fn amdahl_acceleration_estimate(tb_fraction: f64) -> Result<f64, MetricsError> {
    if !(tb_fraction > 0.0 && tb_fraction <= 1.0) {
        return Err(MetricsError::Fraction(tb_fraction));
    }
    Ok(1.0 / tb_fraction)
}

pub fn effective_dut_frequency(system_freq_hz: f64, cclocks: u64, uclocks: u64) -> Result<f64, MetricsError> {
    if uclocks == 0 {
        return Err(MetricsError::NoUclocks);
    }
    Ok(system_freq_hz * cclocks as f64 / uclocks as f64)
}

pub fn percent_increase(from: f64, to: f64) -> f64 {
    (to - from) / from * 100.0
}

pub fn percent_decrease(from: f64, to: f64) -> f64 {
    (from - to) / from * 100.0
}

/// Linear time model over run counters. All coefficients are seconds per
/// unit; estimates are modeled, not measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub t_event: f64,
    pub t_signal: f64,
    pub t_msg: f64,
    pub t_uclock: f64,
}

impl CostModel {
    pub const ZERO: CostModel = CostModel {
        t_event: 0.0,
        t_signal: 0.0,
        t_msg: 0.0,
        t_uclock: 0.0,
    };

    pub fn validate(&self) -> Result<(), MetricsError> {
        for (name, v) in [
            ("t_event", self.t_event),
            ("t_signal", self.t_signal),
            ("t_msg", self.t_msg),
            ("t_uclock", self.t_uclock),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(MetricsError::Coefficient(name));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> CostModel {
        CostModel {
            t_event: self.t_event * k,
            t_signal: self.t_signal * k,
            t_msg: self.t_msg * k,
            t_uclock: self.t_uclock * k,
        }
    }
}

impl Default for CostModel {
    /// Output of the `calibrate_cost_model` example: non-negative fit of
    /// full-scale s400 counters to the published per-mode run times, with
    /// `t_uclock` pinned to one system-clock period.
    fn default() -> Self {
        CostModel {
            t_event: 6.023e-7,
            t_signal: 4.838e-7,
            t_msg: 3.222e-6,
            t_uclock: 1.0 / DEFAULT_SYSTEM_FREQUENCY_HZ,
        }
    }
}

pub fn estimate_time(stats: &RunStats, model: &CostModel) -> f64 {
    stats.events as f64 * model.t_event
        + stats.signal_transfers as f64 * model.t_signal
        + (stats.hw_reads + stats.hw_writes) as f64 * model.t_msg
        + stats.uclocks as f64 * model.t_uclock
}

/// Counters for one run. Field names are the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunStats {
    pub mode: Mode,
    pub n: usize,
    pub vectors: u64,
    pub uclocks: u64,
    pub cclocks: u64,
    pub hw_reads: u64,
    pub hw_writes: u64,
    pub signal_transfers: u64,
    pub events: u64,
    /// Percent of `events` per process tag.
    pub attribution: BTreeMap<String, f64>,
    pub wall_seconds: f64,
    pub estimated_seconds: f64,
}

impl RunStats {
    pub fn effective_dut_frequency(&self, system_freq_hz: f64) -> Result<f64, MetricsError> {
        effective_dut_frequency(system_freq_hz, self.cclocks, self.uclocks)
    }

    /// Share of events charged to testbench processes, in `[0, 1]`.
    pub fn testbench_fraction(&self) -> f64 {
        let tb: f64 = self
            .attribution
            .iter()
            .filter(|(k, _)| ["ClockGen", "ResetSeq", "ScanEnableSeq", "ScanSeq"].contains(&k.as_str()))
            .map(|(_, v)| v)
            .sum();
        tb / 100.0
    }
}

/// Percentages over the non-zero tags of `counts`.
pub fn attribution_percentages(counts: &Attribution) -> BTreeMap<String, f64> {
    let total = counts.total();
    counts
        .iter()
        .filter(|&(_, c)| c > 0)
        .map(|(tag, c)| (tag.name().to_string(), c as f64 * 100.0 / total as f64))
        .collect()
}
