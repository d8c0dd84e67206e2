//! Runs the same scan test plan on s400 under direct simulation,
//! acceleration, pass-through emulation and FSM emulation, in parallel,
//! and checks the logs agree.
//!
//!     cargo run --release --example four_modes [-- <vectors>]

use scanemu::harness::{compare_golden, run_plans, Mode, RunOptions, TestPlan};
use scanemu::netlist::Netlist;
use scanemu::scan::{insert_scan, ScanConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vectors: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1024);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/s400.bench");
    let scan = insert_scan(Netlist::from_file(path)?, &ScanConfig::default())?;
    let jobs: Vec<_> = Mode::ALL
        .iter()
        .map(|&m| (TestPlan::new(m, vectors), RunOptions::default()))
        .collect();
    let runs = run_plans(&scan, &jobs).into_iter().collect::<Result<Vec<_>, _>>()?;

    println!(
        "{:<13} {:>9} {:>9} {:>9} {:>10} {:>11} {:>10}",
        "mode", "cclocks", "uclocks", "hw_reads", "signals", "events", "modeled_s"
    );
    for o in &runs {
        let s = &o.stats;
        println!(
            "{:<13} {:>9} {:>9} {:>9} {:>10} {:>11} {:>10.4}",
            s.mode.name(),
            s.cclocks,
            s.uclocks,
            s.hw_reads,
            s.signal_transfers,
            s.events,
            s.estimated_seconds
        );
    }
    for o in &runs[1..] {
        println!("{} vs direct: {}", o.stats.mode, compare_golden(&runs[0].golden, &o.golden));
    }
    Ok(())
}
