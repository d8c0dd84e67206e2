//! A minimal transactor behind the bridge: it doubles each 16-bit word,
//! needing one controlled clock per message, with the cclock running at
//! 2/3 of the uclock.
//!
//!     cargo run --example bridge_handshake

use scanemu::bridge::{Bridge, BridgeConfig, BridgeError, ClockParams, Message, Transactor};
use scanemu::scan::{insert_scan, ScanConfig};
use scanemu::sim::{Dut, SimOptions};
use scanemu::synth::counter;

#[derive(Default)]
struct Doubler {
    held: Option<u64>,
    out: Option<Message>,
}

impl Transactor for Doubler {
    fn in_widths(&self) -> Vec<usize> {
        vec![16]
    }
    fn out_widths(&self) -> Vec<usize> {
        vec![16]
    }
    fn reset(&mut self) {
        *self = Doubler::default();
    }
    fn in_ready(&self, _: usize) -> bool {
        self.held.is_none() && self.out.is_none()
    }
    fn accept(&mut self, _: usize, msg: Message) -> Result<(), BridgeError> {
        self.held = msg.to_u64();
        Ok(())
    }
    fn out_offer(&self, _: usize) -> Option<&Message> {
        self.out.as_ref()
    }
    fn out_taken(&mut self, _: usize) {
        self.out = None;
    }
    fn ready_for_cclock(&self) -> bool {
        self.held.is_some()
    }
    fn clock(&mut self, granted: bool, _: &mut Dut<'_>) -> Result<(), BridgeError> {
        if granted {
            if let Some(v) = self.held.take() {
                self.out = Some(Message::from_u64(16, (v * 2) & 0xFFFF)?);
            }
        }
        Ok(())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scan = insert_scan(counter(1), &ScanConfig::default())?;
    let config = BridgeConfig {
        clock: ClockParams {
            ratio_num: 2,
            ratio_den: 3,
            reset_cycles: 4,
            ..ClockParams::default()
        },
        turnaround: 1,
        record_edges: true,
        ..BridgeConfig::default()
    };
    let mut bridge = Bridge::new(Doubler::default(), Dut::new(&scan, SimOptions::default()), config)?;
    for v in [21u64, 1000, 4242] {
        let reply = bridge.transact(0, Message::from_u64(16, v)?, 0)?;
        println!("{v:>5} -> {:?} ({})", reply, reply.to_u64().unwrap());
    }
    println!("\nuclock  ureset  ready  cclock");
    for e in bridge.edge_log() {
        println!("{:>6}  {:>6}  {:>5}  {:>6}", e.uclock, e.ureset as u8, e.ready_for_cclock as u8, e.granted as u8);
    }
    println!("\n{:?}", bridge.stats());
    Ok(())
}
