use std::fmt::Write;

use serde_json::json;

use super::{
    amdahl_acceleration_estimate, estimate_time, percent_decrease, percent_increase, scan_complexity,
    workload_split, CostModel, RunStats, DEFAULT_SYSTEM_FREQUENCY_HZ,
};
use crate::harness::Mode;
use crate::sim::ProcessTag;

/// Published figures printed next to the model's own numbers for context.
/// None of them is a pass/fail target.
mod published {
    pub const TESTBENCH_PERCENT: f64 = 44.71;
    pub const DUT_PERCENT: f64 = 55.29;
    pub const SECONDS: [(&str, f64); 4] = [
        ("direct", 921.0),
        ("acceleration", 435.0),
        ("emul-pass", 379.0),
        ("emul-fsm", 158.0),
    ];
    pub const READS_PASS: u64 = 3_241_936;
    pub const READS_FSM: u64 = 1_383_556;
    pub const STATED_READ_DECREASE: f64 = 57.23;
    pub const DUT_KHZ_PASS: f64 = 254.75;
    pub const DUT_KHZ_FSM: f64 = 681.84;
    pub const CCLOCKS_PASS: u64 = 25_211_651;
    pub const CCLOCKS_FSM: u64 = 8_238_807;
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("no runs to report")]
    Empty,
    #[error("runs disagree on chain length ({0} vs {1}); report one design at a time")]
    MixedChainLength(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
}

impl Report {
    pub fn json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report JSON serializes");
        s.push('\n');
        s
    }
}

/// Renders comparison tables for a set of runs of one design. `estimated_seconds`
/// is recomputed from `model`. Output is a pure function of the inputs.
pub fn render_report(runs: &[RunStats], model: &CostModel) -> Result<Report, ReportError> {
    let first = runs.first().ok_or(ReportError::Empty)?;
    if let Some(other) = runs.iter().find(|r| r.n != first.n) {
        return Err(ReportError::MixedChainLength(first.n, other.n));
    }
    let n = first.n;
    let runs: Vec<RunStats> = runs
        .iter()
        .map(|r| RunStats {
            estimated_seconds: estimate_time(r, model),
            ..r.clone()
        })
        .collect();
    let find = |m: Mode| runs.iter().find(|r| r.mode == m);

    let mut text = String::new();
    let mut json = json!({
        "runs": runs,
        "cost_model": model,
        "system_frequency_hz": DEFAULT_SYSTEM_FREQUENCY_HZ,
    });

    // Run summary with modeled speedup.
    let baseline = find(Mode::Direct)
        .or_else(|| runs.iter().max_by(|a, b| a.estimated_seconds.total_cmp(&b.estimated_seconds)))
        .map(|r| r.estimated_seconds)
        .unwrap_or(0.0);
    let _ = writeln!(text, "Run summary (times are modeled, not measured)");
    let rows = runs
        .iter()
        .map(|r| {
            vec![
                r.mode.to_string(),
                r.n.to_string(),
                r.vectors.to_string(),
                r.uclocks.to_string(),
                r.cclocks.to_string(),
                r.hw_reads.to_string(),
                r.hw_writes.to_string(),
                r.signal_transfers.to_string(),
                r.events.to_string(),
                format!("{:.6}", r.estimated_seconds),
                speedup(baseline, r.estimated_seconds),
            ]
        })
        .collect();
    text.push_str(&table(
        &[
            "mode", "n", "vectors", "uclocks", "cclocks", "hw_reads", "hw_writes", "signals", "events",
            "modeled_s", "speedup",
        ],
        rows,
    ));
    let refs: Vec<String> = published::SECONDS
        .iter()
        .map(|(m, s)| format!("{m} {s:.0} s"))
        .collect();
    let _ = writeln!(text, "published reference run times: {}", refs.join(", "));
    text.push('\n');

    // Profiler attribution.
    let _ = writeln!(text, "Profiler attribution (% of software-side events)");
    let mut header = vec!["process".to_string()];
    header.extend(runs.iter().map(|r| r.mode.to_string()));
    let rows = ProcessTag::ALL
        .iter()
        .filter(|t| runs.iter().any(|r| r.attribution.contains_key(t.name())))
        .map(|t| {
            let mut row = vec![t.name().to_string()];
            row.extend(
                runs.iter()
                    .map(|r| r.attribution.get(t.name()).map_or("-".into(), |p| format!("{p:.2}"))),
            );
            row
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    text.push_str(&table(&header_refs, rows));
    let _ = writeln!(
        text,
        "published reference split: testbench {:.2}%, DUT {:.2}%",
        published::TESTBENCH_PERCENT,
        published::DUT_PERCENT
    );
    text.push('\n');

    // Amdahl estimate from the direct run's own split.
    let published_estimate = amdahl_acceleration_estimate(published::TESTBENCH_PERCENT / 100.0)
        .expect("published fraction is in range");
    let _ = writeln!(text, "Acceleration estimate (1 / testbench fraction)");
    let mut amdahl = json!({ "published_testbench_fraction": published::TESTBENCH_PERCENT / 100.0,
                             "published_estimate": published_estimate });
    if let Some(direct) = find(Mode::Direct) {
        let f = direct.testbench_fraction();
        match amdahl_acceleration_estimate(f) {
            Ok(x) => {
                let _ = writeln!(text, "model: testbench {:.2}% -> {x:.4}x", f * 100.0);
                amdahl["model_testbench_fraction"] = json!(f);
                amdahl["model_estimate"] = json!(x);
            }
            Err(_) => {
                let _ = writeln!(text, "model: no testbench events recorded");
            }
        }
    }
    let _ = writeln!(
        text,
        "published reference: testbench {:.2}% -> {published_estimate:.4}x",
        published::TESTBENCH_PERCENT
    );
    json["amdahl"] = amdahl;
    text.push('\n');

    // Complexity and workload split.
    let _ = writeln!(text, "Scan complexity and workload split");
    if let Ok(total) = scan_complexity(n as u32) {
        let _ = writeln!(text, "O(n) = 2^n (n+1) + n = {total} clock cycles for n = {n}");
        let mut split_json = Vec::new();
        if let Ok(total) = u64::try_from(total) {
            let rows = [0.8, 0.6, 0.4, 0.2]
                .iter()
                .map(|&f| {
                    let tb = workload_split(total, f).expect("fraction in range");
                    split_json.push(json!({ "tb_fraction": f, "tb_cycles": tb, "dut_cycles": total - tb }));
                    vec![format!("{:.0}%", f * 100.0), tb.to_string(), (total - tb).to_string()]
                })
                .collect();
            text.push_str(&table(&["in testbench", "tb_cycles", "dut_cycles"], rows));
        }
        json["scan_complexity"] = json!({ "n": n, "cycles": total.to_string(), "split": split_json });
    }
    text.push('\n');

    // Controlled clocks.
    let _ = writeln!(text, "Controlled clocks required for test");
    let rows = runs
        .iter()
        .map(|r| vec![r.mode.to_string(), r.vectors.to_string(), r.cclocks.to_string()])
        .collect();
    text.push_str(&table(&["mode", "vectors", "cclocks"], rows));
    let _ = writeln!(
        text,
        "published reference: emul-pass {}, emul-fsm {} (below the shift arithmetic; not targets)",
        published::CCLOCKS_PASS,
        published::CCLOCKS_FSM
    );
    text.push('\n');

    // Transaction comparison.
    if let (Some(pass), Some(fsm)) = (find(Mode::EmulPassThrough), find(Mode::EmulFsm)) {
        let _ = writeln!(text, "Emulation comparison: pass-through vs FSM transactor");
        let f_pass = pass.effective_dut_frequency(DEFAULT_SYSTEM_FREQUENCY_HZ).ok();
        let f_fsm = fsm.effective_dut_frequency(DEFAULT_SYSTEM_FREQUENCY_HZ).ok();
        let khz = |f: Option<f64>| f.map_or("-".into(), |f| format!("{:.2}", f / 1e3));
        let diff = pass.hw_reads as i64 - fsm.hw_reads as i64;
        let dec = percent_decrease(pass.hw_reads as f64, fsm.hw_reads as f64);
        let inc = match (f_pass, f_fsm) {
            (Some(a), Some(b)) => Some(percent_increase(a, b)),
            _ => None,
        };
        let rows = vec![
            vec![
                "read value".into(),
                pass.hw_reads.to_string(),
                fsm.hw_reads.to_string(),
                diff.to_string(),
                format!("{dec:.2}% decrease"),
            ],
            vec![
                "DUT frequency (kHz)".into(),
                khz(f_pass),
                khz(f_fsm),
                match (f_pass, f_fsm) {
                    (Some(a), Some(b)) => format!("{:.2}", (b - a) / 1e3),
                    _ => "-".into(),
                },
                inc.map_or("-".into(), |p| format!("{p:.2}% increase")),
            ],
            vec![
                "modeled seconds".into(),
                format!("{:.6}", pass.estimated_seconds),
                format!("{:.6}", fsm.estimated_seconds),
                format!("{:.6}", pass.estimated_seconds - fsm.estimated_seconds),
                String::new(),
            ],
        ];
        text.push_str(&table(&["metric", "emul-pass", "emul-fsm", "difference", "change"], rows));
        let pub_dec = percent_decrease(published::READS_PASS as f64, published::READS_FSM as f64);
        let pub_inc = percent_increase(published::DUT_KHZ_PASS, published::DUT_KHZ_FSM);
        let _ = writeln!(
            text,
            "published reference: reads {} vs {} (difference {}, {:.2}% decrease recomputed; {:.2}% as printed), \
             DUT {:.2} vs {:.2} kHz ({pub_inc:.2}% increase) at {:.2} MHz system clock",
            published::READS_PASS,
            published::READS_FSM,
            published::READS_PASS - published::READS_FSM,
            pub_dec,
            published::STATED_READ_DECREASE,
            published::DUT_KHZ_PASS,
            published::DUT_KHZ_FSM,
            DEFAULT_SYSTEM_FREQUENCY_HZ / 1e6,
        );
        json["emulation"] = json!({
            "hw_reads_pass": pass.hw_reads,
            "hw_reads_fsm": fsm.hw_reads,
            "read_difference": diff,
            "read_percent_decrease": dec,
            "dut_frequency_hz_pass": f_pass,
            "dut_frequency_hz_fsm": f_fsm,
            "dut_frequency_percent_increase": inc,
        });
    }

    Ok(Report { text, json })
}

fn speedup(baseline: f64, t: f64) -> String {
    if t > 0.0 {
        format!("{:.2}x", baseline / t)
    } else {
        "-".into()
    }
}

/// Fixed-width table: first column left-aligned, the rest right-aligned.
fn table(headers: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&mut rule.iter().map(String::as_str)));
    for row in &rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}
