//! Drives the scan FSM transactor by hand on the 3-bit counter: one
//! message per vector instead of one per clock.
//!
//!     cargo run --example fsm_transactor

use scanemu::bridge::{Bridge, BridgeConfig, Message};
use scanemu::harness::vector_bits;
use scanemu::scan::{insert_scan, ScanConfig};
use scanemu::sim::{Dut, SimOptions};
use scanemu::synth::counter;
use scanemu::transactor::fsm::{vector_message, VectorControls, FLUSH_PORT, VECTOR_PORT};
use scanemu::transactor::FsmState;

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scan = insert_scan(counter(3), &ScanConfig::default())?;
    let n = scan.chain_length();
    let dut = Dut::new(&scan, SimOptions::default());
    let xtor = FsmState::for_dut(&dut).with_trace();
    let mut bridge = Bridge::new(xtor, dut, BridgeConfig::default())?;
    bridge.finish_reset()?;

    let clear = VectorControls {
        clr: true,
        ..VectorControls::default()
    };
    bridge.transact(VECTOR_PORT, vector_message(n, &vec![false; n], clear)?, 0)?;

    // Response k belongs to vector k-1; the flush drains the last one.
    for v in 0..(1u64 << n) {
        let reply = bridge.transact(VECTOR_PORT, vector_message(n, &vector_bits(v, n), VectorControls::default())?, 0)?;
        let out = bits(&reply.to_bits()[..n]);
        match v {
            0 => println!("send vector {v} ({}); chain held {out}", bits(&vector_bits(v, n))),
            _ => println!("send vector {v} ({}); response to vector {}: {out}", bits(&vector_bits(v, n)), v - 1),
        }
    }
    let last = bridge.transact(FLUSH_PORT, Message::from_u64(1, 1)?, 0)?;
    println!("flush; response to vector {}: {}", (1u64 << n) - 1, bits(&last.to_bits()[..n]));

    let stats = bridge.stats();
    println!("\n{} reads, {} writes, {} cclocks, {} uclocks", stats.hw_reads, stats.hw_writes, stats.cclocks, stats.uclocks);
    let trace = bridge.transactor().trace();
    println!("first FSM phases: {:?}", &trace[..trace.len().min(12)]);
    Ok(())
}
