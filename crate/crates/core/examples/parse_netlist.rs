//! Parses an ISCAS89 `.bench` file and prints its census and logic depth.
//!
//!     cargo run --example parse_netlist [-- path/to/design.bench]

use scanemu::netlist::{emit_bench, parse_bench, GateKind, Netlist};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/s400.bench").into());
    let netlist = Netlist::from_file(&path)?;
    let stats = netlist.stats();
    println!("{path}");
    println!("  {stats}");
    for kind in GateKind::ALL {
        let c = stats.count(kind);
        if c > 0 {
            println!("  {:<5} {c}", kind.keyword());
        }
    }
    println!("  logic depth {}", netlist.schedule().depth());

    // Emitting and re-parsing gives the same structure.
    let again = parse_bench(&emit_bench(&netlist))?;
    println!("  round trip structurally equal: {}", netlist.structurally_eq(&again));
    Ok(())
}
