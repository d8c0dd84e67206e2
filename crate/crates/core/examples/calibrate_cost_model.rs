//! Fits the default cost model.
//!
//!     cargo run --release --example calibrate_cost_model
//!
//! Runs the four modes on the bundled s400 design at two desk-scale vector
//! counts, extrapolates every counter linearly to the full 2^21 vectors, and
//! fits non-negative per-unit costs so the modeled run times land as close
//! as possible (in relative terms) to the published 921 / 435 / 379 / 158
//! seconds. The result is what `CostModel::default()` hard-codes.
//!
//! `t_uclock` is not fitted: it is one period of the 8.33 MHz system clock.
//! Left free, the fit trades it against the other terms and pushes the
//! pass-through estimate above acceleration.
//!
//! An exact fit does not exist: the model's FSM run uses far fewer uclocks,
//! messages and events relative to pass-through than the published timing
//! implies, so the fit is a non-negative least-squares compromise. Only the
//! ordering of the modes is relied upon.

use scanemu::harness::{run_plan, Mode, RunOptions, TestPlan};
use scanemu::metrics::{estimate_time, CostModel, RunStats, DEFAULT_SYSTEM_FREQUENCY_HZ};
use scanemu::netlist::Netlist;
use scanemu::scan::{insert_scan, ScanConfig};

const TARGET_SECONDS: [(Mode, f64); 4] = [
    (Mode::Direct, 921.0),
    (Mode::Acceleration, 435.0),
    (Mode::EmulPassThrough, 379.0),
    (Mode::EmulFsm, 158.0),
];

fn features(s: &RunStats) -> [f64; 4] {
    [
        s.events as f64,
        s.signal_transfers as f64,
        (s.hw_reads + s.hw_writes) as f64,
        s.uclocks as f64,
    ]
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/s400.bench");
    let scan = insert_scan(Netlist::from_file(path)?, &ScanConfig::default())?;
    let n = scan.chain_length();
    let (v1, v2, full) = (2048u64, 4096u64, 1u64 << n);

    let mut rows = Vec::new();
    for (mode, target) in TARGET_SECONDS {
        let a = features(&run_plan(&scan, &TestPlan::new(mode, v1), &RunOptions::default())?.stats);
        let b = features(&run_plan(&scan, &TestPlan::new(mode, v2), &RunOptions::default())?.stats);
        let at_full: Vec<f64> = (0..4)
            .map(|i| {
                let slope = (b[i] - a[i]) / (v2 - v1) as f64;
                a[i] + slope * (full - v1) as f64
            })
            .collect();
        println!(
            "{mode:>12}: events {:.4e}  signals {:.4e}  messages {:.4e}  uclocks {:.4e}  (target {target} s)",
            at_full[0], at_full[1], at_full[2], at_full[3]
        );
        rows.push((mode, at_full, target));
    }

    // Weighted by 1/target so every mode counts in relative terms.
    let t_uclock = 1.0 / DEFAULT_SYSTEM_FREQUENCY_HZ;
    let a: Vec<Vec<f64>> = rows
        .iter()
        .map(|(_, x, t)| x[..3].iter().map(|v| v / t).collect())
        .collect();
    let b: Vec<f64> = rows.iter().map(|(_, x, t)| 1.0 - x[3] * t_uclock / t).collect();
    let coef = nnls(&a, &b);
    let model = CostModel {
        t_event: coef[0],
        t_signal: coef[1],
        t_msg: coef[2],
        t_uclock,
    };
    println!("\nfitted: {model:?}");

    println!("\n{:>12}  {:>10}  {:>10}", "mode", "modeled_s", "target_s");
    for (mode, x, target) in &rows {
        let stats = RunStats {
            mode: *mode,
            n,
            vectors: full,
            uclocks: x[3] as u64,
            cclocks: 0,
            hw_reads: (x[2] / 2.0) as u64,
            hw_writes: (x[2] / 2.0) as u64,
            signal_transfers: x[1] as u64,
            events: x[0] as u64,
            attribution: Default::default(),
            wall_seconds: 0.0,
            estimated_seconds: 0.0,
        };
        println!("{mode:>12}  {:>10.1}  {target:>10.1}", estimate_time(&stats, &model));
    }
    let times: Vec<f64> = rows
        .iter()
        .map(|(_, x, _)| x[0] * model.t_event + x[1] * model.t_signal + x[2] * model.t_msg + x[3] * model.t_uclock)
        .collect();
    let ordered = times.windows(2).all(|w| w[0] > w[1]);
    println!("\nordering direct > acceleration > emul-pass > emul-fsm: {}", if ordered { "holds" } else { "VIOLATED" });
    println!("current default: {:?}", CostModel::default());
    Ok(())
}

/// Non-negative least squares for a handful of unknowns: try every support
/// set, solve the normal equations on it and keep the best feasible fit.
fn nnls(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = a[0].len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let cols: Vec<usize> = (0..k).filter(|&j| mask >> j & 1 == 1).collect();
        let Some(sol) = least_squares(a, b, &cols) else {
            continue;
        };
        if sol.iter().any(|&x| x < 0.0) {
            continue;
        }
        let mut full = vec![0.0; k];
        for (&j, &x) in cols.iter().zip(&sol) {
            full[j] = x;
        }
        let residual: f64 = a
            .iter()
            .zip(b)
            .map(|(row, &y)| {
                let r = row.iter().zip(&full).map(|(p, q)| p * q).sum::<f64>() - y;
                r * r
            })
            .sum();
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, full));
        }
    }
    best.expect("some support set is feasible").1
}

fn least_squares(a: &[Vec<f64>], b: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let m = cols.len();
    // Normal equations with column scaling for conditioning.
    let scale: Vec<f64> = cols
        .iter()
        .map(|&j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let mut g = vec![vec![0.0; m + 1]; m];
    for (p, &jp) in cols.iter().enumerate() {
        for (q, &jq) in cols.iter().enumerate() {
            g[p][q] = a.iter().map(|r| r[jp] / scale[p] * r[jq] / scale[q]).sum();
        }
        g[p][m] = a.iter().zip(b).map(|(r, y)| r[jp] / scale[p] * y).sum();
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))?;
        if g[pivot][col].abs() < 1e-12 {
            return None;
        }
        g.swap(col, pivot);
        let pivot_row = g[col].clone();
        for (row, r) in g.iter_mut().enumerate() {
            if row != col {
                let f = r[col] / pivot_row[col];
                for (x, p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..m).map(|p| g[p][m] / g[p][p] / scale[p]).collect())
}
