//! Regenerates `data/s400.bench`, the structural stand-in for the ISCAS89
//! s400 benchmark (same I/O names and gate census, random wiring).
//!
//!     cargo run --example s400_profile [-- <output path>]
//!
//! Drop the original benchmark file in its place to run on the real circuit.

use std::path::PathBuf;

use scanemu::netlist::emit_bench;
use scanemu::synth::{s400_census_spec, s400_profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/s400.bench"));
    let netlist = s400_profile();
    let spec = s400_census_spec();
    let mut text = String::new();
    text.push_str("# Structural stand-in for ISCAS89 s400: identical I/O names, 21 flip-flops and\n");
    text.push_str("# gate census, randomly wired (acyclic, every net used).\n");
    text.push_str(&format!(
        "# Generated by `cargo run --example s400_profile` (seed {}).\n",
        spec.seed
    ));
    text.push_str("# Replace with the original benchmark file to simulate the real circuit.\n");
    text.push_str(&emit_bench(&netlist));
    std::fs::write(&out, text)?;
    println!("wrote {} ({})", out.display(), netlist.stats());
    Ok(())
}
