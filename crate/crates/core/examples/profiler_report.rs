//! Profiles the four modes on s400 and renders the comparison report
//! (run summary, process attribution, acceleration estimate, complexity,
//! clock counts and the emulation comparison).
//!
//!     cargo run --release --example profiler_report [-- <vectors>]

use scanemu::harness::{run_plans, Mode, RunOptions, TestPlan};
use scanemu::metrics::{render_report, CostModel};
use scanemu::netlist::Netlist;
use scanemu::scan::{insert_scan, ScanConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vectors: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4096);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/s400.bench");
    let scan = insert_scan(Netlist::from_file(path)?, &ScanConfig::default())?;
    let jobs: Vec<_> = Mode::ALL
        .iter()
        .map(|&m| (TestPlan::new(m, vectors), RunOptions::default()))
        .collect();
    let stats: Vec<_> = run_plans(&scan, &jobs)
        .into_iter()
        .map(|r| r.map(|o| o.stats))
        .collect::<Result<_, _>>()?;
    let report = render_report(&stats, &CostModel::default())?;
    print!("{}", report.text);
    Ok(())
}
