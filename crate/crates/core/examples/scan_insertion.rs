//! Inserts a full scan chain with a custom order and prints the result.
//!
//!     cargo run --example scan_insertion

use scanemu::scan::{insert_scan, ScanConfig};
use scanemu::synth::counter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scan = insert_scan(counter(4), &ScanConfig::with_order(vec![3, 1, 2, 0]))?;
    let base = scan.base();
    println!("chain ({} cells), TDI first:", scan.chain_length());
    for (k, cell) in scan.chain().iter().enumerate() {
        println!(
            "  [{k}] {:<3} scan_in={:<4} d={}",
            scan.net_name(cell.q),
            scan.net_name(cell.scan_in),
            base.net_name(cell.d)
        );
    }
    let (ins, outs) = scan.boundary_io();
    println!("TDO = {}; boundary {ins} inputs / {outs} outputs", scan.net_name(scan.tdo()));
    println!("\n{}", scan.emit_bench());
    Ok(())
}
