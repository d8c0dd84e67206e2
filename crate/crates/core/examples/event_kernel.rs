//! Compares the event-driven kernel with the full-sweep engine on s400,
//! with the per-tick cross-check on, and dumps a short VCD.
//!
//!     cargo run --example event_kernel

use scanemu::netlist::Netlist;
use scanemu::scan::{insert_scan, ScanConfig};
use scanemu::sim::{Dut, Engine, InputFrame, ProcessTag, SimOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/s400.bench");
    let scan = insert_scan(Netlist::from_file(path)?, &ScanConfig::default())?;
    let n_in = scan.base().inputs().len();

    // Reset, a burst of shifts, then a capture.
    let mut frames = vec![InputFrame::reset(n_in)];
    frames.extend((0..scan.chain_length()).map(|i| InputFrame::shift(n_in, i % 3 == 0)));
    frames.push(InputFrame::capture(n_in));

    for engine in [Engine::EventDriven, Engine::FullSweep] {
        let mut dut = Dut::new(&scan, SimOptions { engine, oracle_check: true });
        for f in &frames {
            dut.tick(f, ProcessTag::ScanSeq)?;
        }
        let s = &dut.state;
        println!(
            "{engine:?}: {} cycles, {} gate evaluations, TDO={}",
            s.cclock_count,
            s.attribution.get(ProcessTag::Dut),
            dut.outputs().tdo
        );
    }

    let vcd = std::env::temp_dir().join("scanemu_event_kernel.vcd");
    let mut dut = Dut::new(&scan, SimOptions::default());
    dut.record_waveform(Box::new(std::fs::File::create(&vcd)?))?;
    for f in &frames {
        dut.tick(f, ProcessTag::ScanSeq)?;
    }
    drop(dut);
    println!("waveform: {}", vcd.display());
    Ok(())
}
