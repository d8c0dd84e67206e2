//! Software model of a function-based co-emulation bridge.
//!
//! Message in-ports carry data from the software proxies to the hardware
//! transactor, out-ports carry it back. Every transfer is a dual-ready
//! handshake sampled on an edge of the free-running uclock. A clock control
//! block derives the DUT's controlled clock (cclock) from the uclock and
//! withholds it whenever the transactor drops `ready_for_cclock`, which
//! freezes the DUT while the transactor waits for data.
//!
//! [`Bridge`] is the single-threaded lockstep scheduler. On every uclock
//! edge it:
//!
//! 1. steps every in-port handshake and hands delivered messages to the
//!    transactor;
//! 2. steps every out-port handshake against the transactor's offers;
//! 3. samples `ready_for_cclock` and advances the clock control;
//! 4. clocks the transactor, which ticks the DUT iff a cclock was granted.
//!
//! While Ureset is high (the first `reset_cycles` edges) the transactor is
//! held in reset and no cclock is granted. Software-side sends happen
//! between edges.

mod clock;
mod message;
mod port;

use serde::{Deserialize, Serialize};

use crate::sim::{Dut, SimError};

pub use clock::{ClockControl, ClockParams, ClockStep};
pub use message::{pack, unpack, Message};
pub use port::{Direction, PortEndpoint};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BridgeError {
    #[error("messages must be at least one bit wide")]
    ZeroWidth,
    #[error("value {value:#x} does not fit in {width} bits")]
    ValueTooWide { width: usize, value: u64 },
    #[error("port `{port}`: message width {got}, port width {expected}")]
    Width {
        port: String,
        expected: usize,
        got: usize,
    },
    #[error("port `{port}` used in the wrong direction")]
    Direction { port: String },
    #[error("port `{port}` stepped twice on uclock {uclock}")]
    DoubleStep { port: String, uclock: u64 },
    #[error("no such port index {0}")]
    NoSuchPort(usize),
    #[error("clock ratio {num}/{den} must be in (0, 1]")]
    BadClockRatio { num: u32, den: u32 },
    #[error("bridge stalled: no response after {uclocks} uclocks (at uclock {at})")]
    Stall { uclocks: u64, at: u64 },
    #[error("transactor protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Hardware-side bus-functional model driven by the bridge scheduler.
pub trait Transactor {
    fn in_widths(&self) -> Vec<usize>;
    fn out_widths(&self) -> Vec<usize>;
    /// Called on every edge while Ureset is high.
    fn reset(&mut self);
    /// The transactor's receive-ready for in-port `port`.
    fn in_ready(&self, port: usize) -> bool;
    fn accept(&mut self, port: usize, msg: Message) -> Result<(), BridgeError>;
    /// Message presented on out-port `port`, if any.
    fn out_offer(&self, port: usize) -> Option<&Message>;
    fn out_taken(&mut self, port: usize);
    fn ready_for_cclock(&self) -> bool;
    /// One uclock edge of transactor logic; `granted` says whether the DUT
    /// receives a controlled clock edge on it.
    fn clock(&mut self, granted: bool, dut: &mut Dut<'_>) -> Result<(), BridgeError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeConfig {
    pub clock: ClockParams,
    /// Idle uclocks the software spends between receiving a response and
    /// sending the next message in lockstep mode.
    pub turnaround: u32,
    /// Uclocks [`Bridge::transact`] waits for a response before giving up.
    pub stall_limit: u64,
    pub fifo_high_water: usize,
    pub record_edges: bool,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        BridgeConfig {
            clock: ClockParams::default(),
            turnaround: 4,
            stall_limit: 1 << 20,
            fifo_high_water: 1024,
            record_edges: false,
        }
    }
}

/// Counter snapshot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeStats {
    /// In-port deliveries to the hardware.
    pub hw_reads: u64,
    /// Out-port deliveries to the software.
    pub hw_writes: u64,
    pub uclocks: u64,
    pub cclocks: u64,
}

pub struct Bridge<'a, T: Transactor> {
    xtor: T,
    dut: Dut<'a>,
    ins: Vec<PortEndpoint>,
    outs: Vec<PortEndpoint>,
    clock: ClockControl,
    config: BridgeConfig,
    edges: Vec<ClockStep>,
}

impl<'a, T: Transactor> Bridge<'a, T> {
    pub fn new(xtor: T, dut: Dut<'a>, config: BridgeConfig) -> Result<Self, BridgeError> {
        let port = |name: String, dir, width| {
            PortEndpoint::new(name, dir, width).map(|p| p.with_high_water(config.fifo_high_water))
        };
        let ins = xtor
            .in_widths()
            .into_iter()
            .enumerate()
            .map(|(i, w)| port(format!("in{i}"), Direction::In, w))
            .collect::<Result<_, _>>()?;
        let outs = xtor
            .out_widths()
            .into_iter()
            .enumerate()
            .map(|(i, w)| port(format!("out{i}"), Direction::Out, w))
            .collect::<Result<_, _>>()?;
        Ok(Bridge {
            xtor,
            dut,
            ins,
            outs,
            clock: ClockControl::new(config.clock)?,
            config,
            edges: Vec::new(),
        })
    }

    pub fn config(&self) -> &BridgeConfig {
        &self.config
    }

    pub fn transactor(&self) -> &T {
        &self.xtor
    }

    pub fn dut(&self) -> &Dut<'a> {
        &self.dut
    }

    pub fn dut_mut(&mut self) -> &mut Dut<'a> {
        &mut self.dut
    }

    pub fn clock_control(&self) -> &ClockControl {
        &self.clock
    }

    pub fn in_port(&self, i: usize) -> Option<&PortEndpoint> {
        self.ins.get(i)
    }

    pub fn out_port(&self, i: usize) -> Option<&PortEndpoint> {
        self.outs.get(i)
    }

    /// Per-edge clock log (empty unless `record_edges` is set).
    pub fn edge_log(&self) -> &[ClockStep] {
        &self.edges
    }

    pub fn into_parts(self) -> (T, Dut<'a>) {
        (self.xtor, self.dut)
    }

    /// Software proxy send on in-port `port`.
    pub fn send(&mut self, port: usize, msg: Message) -> Result<(), BridgeError> {
        self.ins
            .get_mut(port)
            .ok_or(BridgeError::NoSuchPort(port))?
            .proxy_send(msg)
    }

    /// Software proxy receive on out-port `port`.
    pub fn recv(&mut self, port: usize) -> Option<Message> {
        self.outs.get_mut(port)?.proxy_receive()
    }

    /// One uclock edge.
    pub fn step(&mut self) -> Result<ClockStep, BridgeError> {
        let u = self.clock.uclock_count();
        for (i, p) in self.ins.iter_mut().enumerate() {
            let ready = !self.clock.in_reset() && self.xtor.in_ready(i);
            if let Some(msg) = p.hw_receive_step(u, ready)? {
                self.xtor.accept(i, msg)?;
            }
        }
        for (i, p) in self.outs.iter_mut().enumerate() {
            let offer = if self.clock.in_reset() { None } else { self.xtor.out_offer(i) };
            if p.hw_send_step(u, offer)? {
                self.xtor.out_taken(i);
            }
        }
        let step = if self.clock.in_reset() {
            self.xtor.reset();
            self.clock.clock_step(false)
        } else {
            let step = self.clock.clock_step(self.xtor.ready_for_cclock());
            self.xtor.clock(step.granted, &mut self.dut)?;
            step
        };
        if self.config.record_edges {
            self.edges.push(step);
        }
        Ok(step)
    }

    pub fn idle(&mut self, uclocks: u64) -> Result<(), BridgeError> {
        for _ in 0..uclocks {
            self.step()?;
        }
        Ok(())
    }

    /// Steps until Ureset has been released.
    pub fn finish_reset(&mut self) -> Result<(), BridgeError> {
        while self.clock.in_reset() {
            self.step()?;
        }
        Ok(())
    }

    /// Lockstep exchange: software turnaround, send on `in_port`, then run
    /// edges until a message arrives on `out_port`.
    pub fn transact(&mut self, in_port: usize, msg: Message, out_port: usize) -> Result<Message, BridgeError> {
        if out_port >= self.outs.len() {
            return Err(BridgeError::NoSuchPort(out_port));
        }
        self.idle(self.config.turnaround as u64)?;
        self.send(in_port, msg)?;
        let start = self.clock.uclock_count();
        loop {
            self.step()?;
            if let Some(reply) = self.recv(out_port) {
                return Ok(reply);
            }
            let waited = self.clock.uclock_count() - start;
            if waited >= self.config.stall_limit {
                return Err(BridgeError::Stall {
                    uclocks: waited,
                    at: self.clock.uclock_count(),
                });
            }
        }
    }

    pub fn stats(&self) -> BridgeStats {
        bridge_stats(&self.ins, &self.outs, &self.clock)
    }
}

pub fn bridge_stats(ins: &[PortEndpoint], outs: &[PortEndpoint], ctrl: &ClockControl) -> BridgeStats {
    BridgeStats {
        hw_reads: ins.iter().map(PortEndpoint::delivered_count).sum(),
        hw_writes: outs.iter().map(PortEndpoint::delivered_count).sum(),
        uclocks: ctrl.uclock_count(),
        cclocks: ctrl.cclock_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{insert_scan, ScanConfig};
    use crate::sim::SimOptions;

    /// Echoes each in-message back after one granted cclock.
    struct Echo {
        held: Option<Message>,
        done: Option<Message>,
    }

    impl Transactor for Echo {
        fn in_widths(&self) -> Vec<usize> {
            vec![8]
        }
        fn out_widths(&self) -> Vec<usize> {
            vec![8]
        }
        fn reset(&mut self) {
            self.held = None;
            self.done = None;
        }
        fn in_ready(&self, _: usize) -> bool {
            self.held.is_none() && self.done.is_none()
        }
        fn accept(&mut self, _: usize, msg: Message) -> Result<(), BridgeError> {
            self.held = Some(msg);
            Ok(())
        }
        fn out_offer(&self, _: usize) -> Option<&Message> {
            self.done.as_ref()
        }
        fn out_taken(&mut self, _: usize) {
            self.done = None;
        }
        fn ready_for_cclock(&self) -> bool {
            self.held.is_some()
        }
        fn clock(&mut self, granted: bool, _: &mut Dut<'_>) -> Result<(), BridgeError> {
            if granted {
                self.done = self.held.take();
            }
            Ok(())
        }
    }

    #[test]
    fn fresh_bridge_counts_nothing() {
        let scan = insert_scan(crate::synth::counter(1), &ScanConfig::default()).unwrap();
        let dut = Dut::new(&scan, SimOptions::default());
        let b = Bridge::new(Echo { held: None, done: None }, dut, BridgeConfig::default()).unwrap();
        assert_eq!(b.stats(), BridgeStats::default());
    }

    #[test]
    fn transact_round_trip() {
        let scan = insert_scan(crate::synth::counter(1), &ScanConfig::default()).unwrap();
        let dut = Dut::new(&scan, SimOptions::default());
        let config = BridgeConfig {
            record_edges: true,
            ..BridgeConfig::default()
        };
        let mut b = Bridge::new(Echo { held: None, done: None }, dut, config).unwrap();
        for v in [3u64, 200, 17] {
            let reply = b.transact(0, Message::from_u64(8, v).unwrap(), 0).unwrap();
            assert_eq!(reply.to_u64(), Some(v));
        }
        let s = b.stats();
        assert_eq!((s.hw_reads, s.hw_writes, s.cclocks), (3, 3, 3));
        assert!(b.edge_log().iter().all(|e| e.ready_for_cclock || !e.granted));
        assert_eq!(b.edge_log().iter().filter(|e| e.ureset).count(), 8);
    }

    #[test]
    fn stall_guard_fires() {
        struct Deaf;
        impl Transactor for Deaf {
            fn in_widths(&self) -> Vec<usize> {
                vec![1]
            }
            fn out_widths(&self) -> Vec<usize> {
                vec![1]
            }
            fn reset(&mut self) {}
            fn in_ready(&self, _: usize) -> bool {
                false
            }
            fn accept(&mut self, _: usize, _: Message) -> Result<(), BridgeError> {
                Ok(())
            }
            fn out_offer(&self, _: usize) -> Option<&Message> {
                None
            }
            fn out_taken(&mut self, _: usize) {}
            fn ready_for_cclock(&self) -> bool {
                false
            }
            fn clock(&mut self, _: bool, _: &mut Dut<'_>) -> Result<(), BridgeError> {
                Ok(())
            }
        }
        let scan = insert_scan(crate::synth::counter(1), &ScanConfig::default()).unwrap();
        let dut = Dut::new(&scan, SimOptions::default());
        let config = BridgeConfig {
            stall_limit: 50,
            ..BridgeConfig::default()
        };
        let mut b = Bridge::new(Deaf, dut, config).unwrap();
        let err = b.transact(0, Message::zeros(1).unwrap(), 0).unwrap_err();
        assert!(matches!(err, BridgeError::Stall { uclocks: 50, .. }));
        assert_eq!(b.in_port(0).unwrap().depth(), 1);
    }
}
