//! Cycle-based, zero-delay simulation of a scanned netlist.
//!
//! Between clock edges the combinational logic is settled by one of two
//! engines:
//!
//! * [`Engine::EventDriven`]: only the fan-out of nets that changed is
//!   re-evaluated. Pending gates sit in a deduplicating queue bucketed by
//!   logic level, so every gate is evaluated at most once per settle.
//! * [`Engine::FullSweep`]: every gate is evaluated once in levelized order.
//!
//! With [`SimOptions::oracle_check`] set, every event-driven settle is
//! followed by a full sweep into scratch storage and the two results are
//! compared net by net.
//!
//! `event_count` counts gate evaluations. Each tick also attributes work to
//! a [`ProcessTag`]: the driving testbench process gets one event for waking
//! up plus one per input net it changed, `ClockGen` gets two (rising and
//! falling edge) and `Dut` gets the gate evaluations.

mod vcd;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::netlist::{GateKind, NetId};
use crate::scan::ScanNetlist;

pub use vcd::VcdRecorder;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("{what} width mismatch: expected {expected}, got {got}")]
    Width {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("event-driven and full-sweep engines disagree on net `{net}` after {cclock} clocks")]
    EngineMismatch { net: String, cclock: u64 },
    #[error("waveform dump failed: {0}")]
    Waveform(String),
}

/// Which process a unit of simulation work is charged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProcessTag {
    ClockGen,
    ResetSeq,
    ScanEnableSeq,
    ScanSeq,
    Dut,
    BridgeSignal,
    BridgeMessage,
}

impl ProcessTag {
    pub const ALL: [ProcessTag; 7] = [
        ProcessTag::ClockGen,
        ProcessTag::ResetSeq,
        ProcessTag::ScanEnableSeq,
        ProcessTag::ScanSeq,
        ProcessTag::Dut,
        ProcessTag::BridgeSignal,
        ProcessTag::BridgeMessage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcessTag::ClockGen => "ClockGen",
            ProcessTag::ResetSeq => "ResetSeq",
            ProcessTag::ScanEnableSeq => "ScanEnableSeq",
            ProcessTag::ScanSeq => "ScanSeq",
            ProcessTag::Dut => "DUT",
            ProcessTag::BridgeSignal => "BridgeSignal",
            ProcessTag::BridgeMessage => "BridgeMessage",
        }
    }

    /// Testbench-side processes (everything that stays in the simulator
    /// when the DUT moves to hardware).
    pub fn is_testbench(self) -> bool {
        matches!(
            self,
            ProcessTag::ClockGen
                | ProcessTag::ResetSeq
                | ProcessTag::ScanEnableSeq
                | ProcessTag::ScanSeq
        )
    }
}

impl fmt::Display for ProcessTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Event counters keyed by [`ProcessTag`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Attribution([u64; 7]);

impl Attribution {
    pub fn get(&self, tag: ProcessTag) -> u64 {
        self.0[tag as usize]
    }

    pub fn add(&mut self, tag: ProcessTag, count: u64) {
        self.0[tag as usize] += count;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProcessTag, u64)> + '_ {
        ProcessTag::ALL.iter().map(|&t| (t, self.get(t)))
    }

    pub fn merge(&mut self, other: &Attribution) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

/// Values applied to the DUT boundary for one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFrame {
    pub primary_inputs: Vec<bool>,
    pub tdi: bool,
    pub scan_enable: bool,
    pub clr: bool,
    pub test_mode: bool,
}

impl InputFrame {
    pub fn zeros(n_inputs: usize) -> Self {
        InputFrame {
            primary_inputs: vec![false; n_inputs],
            tdi: false,
            scan_enable: false,
            clr: false,
            test_mode: false,
        }
    }

    /// Shift cycle with primary inputs held low.
    pub fn shift(n_inputs: usize, tdi: bool) -> Self {
        InputFrame {
            tdi,
            scan_enable: true,
            test_mode: true,
            ..InputFrame::zeros(n_inputs)
        }
    }

    /// Capture cycle with primary inputs held low.
    pub fn capture(n_inputs: usize) -> Self {
        InputFrame {
            test_mode: true,
            ..InputFrame::zeros(n_inputs)
        }
    }

    pub fn reset(n_inputs: usize) -> Self {
        InputFrame {
            clr: true,
            ..InputFrame::zeros(n_inputs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFrame {
    pub primary_outputs: Vec<bool>,
    pub tdo: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub net_values: Vec<bool>,
    /// Scan flip-flop values in chain order.
    pub ff_values: Vec<bool>,
    pub cclock_count: u64,
    pub event_count: u64,
    pub attribution: Attribution,
    /// Nets whose value changed during the most recent settle phase.
    pub last_changed: Vec<NetId>,
}

impl SimState {
    pub fn net(&self, id: NetId) -> bool {
        self.net_values[id.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    EventDriven,
    FullSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimOptions {
    pub engine: Engine,
    pub oracle_check: bool,
}

/// Result of a combinational settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SettleReport {
    pub events: u64,
    pub changed: usize,
}

pub struct Simulator<'a> {
    scan: &'a ScanNetlist,
    options: SimOptions,
    kinds: Vec<GateKind>,
    outs: Vec<u32>,
    in_start: Vec<u32>,
    ins: Vec<u32>,
    levels: Vec<u32>,
    order: Vec<u32>,
    fan_start: Vec<u32>,
    fanout: Vec<u32>,
    buckets: Vec<Vec<u32>>,
    queued: Vec<bool>,
    scratch: Vec<bool>,
    next_ff: Vec<bool>,
}

impl<'a> Simulator<'a> {
    pub fn new(scan: &'a ScanNetlist, options: SimOptions) -> Self {
        let base = scan.base();
        let gates = base.gates();
        let n_nets = scan.net_count();

        let mut in_start = Vec::with_capacity(gates.len() + 1);
        let mut ins = Vec::new();
        in_start.push(0);
        for g in gates {
            ins.extend(g.inputs.iter().map(|n| n.0));
            in_start.push(ins.len() as u32);
        }

        let mut counts = vec![0u32; n_nets + 1];
        for g in gates {
            for i in &g.inputs {
                counts[i.index() + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let fan_start = counts.clone();
        let mut fill = counts;
        let mut fanout = vec![0u32; ins.len()];
        for (gi, g) in gates.iter().enumerate() {
            for i in &g.inputs {
                let slot = &mut fill[i.index()];
                fanout[*slot as usize] = gi as u32;
                *slot += 1;
            }
        }

        let sched = base.schedule();
        let levels: Vec<u32> = (0..gates.len()).map(|g| sched.level(g)).collect();
        Simulator {
            scan,
            options,
            kinds: gates.iter().map(|g| g.kind).collect(),
            outs: gates.iter().map(|g| g.output.0).collect(),
            in_start,
            ins,
            levels,
            order: sched.order().iter().map(|&g| g as u32).collect(),
            fan_start,
            fanout,
            buckets: vec![Vec::new(); sched.depth() as usize + 1],
            queued: vec![false; gates.len()],
            scratch: vec![false; n_nets],
            next_ff: vec![false; scan.chain_length()],
        }
    }

    pub fn scan(&self) -> &'a ScanNetlist {
        self.scan
    }

    pub fn options(&self) -> SimOptions {
        self.options
    }

    /// All flip-flops cleared, all inputs low, nets settled, counters zero.
    pub fn reset_state(&mut self) -> SimState {
        let mut state = SimState {
            net_values: vec![false; self.scan.net_count()],
            ff_values: vec![false; self.scan.chain_length()],
            cclock_count: 0,
            event_count: 0,
            attribution: Attribution::default(),
            last_changed: Vec::new(),
        };
        let mut values = std::mem::take(&mut state.net_values);
        self.sweep_into(&mut values, None);
        state.net_values = values;
        state
    }

    /// Applies `frame` to the inputs and settles the combinational logic
    /// without a clock edge.
    pub fn settle(&mut self, state: &mut SimState, frame: &InputFrame) -> Result<SettleReport, SimError> {
        self.check_frame(frame)?;
        state.last_changed.clear();
        self.apply_inputs(state, frame);
        let report = self.propagate(state)?;
        state.event_count += report.events;
        state.attribution.add(ProcessTag::Dut, report.events);
        Ok(report)
    }

    /// One controlled clock: apply inputs and settle, clock every scan
    /// flip-flop, settle again. Returns the outputs after the edge.
    pub fn tick(
        &mut self,
        state: &mut SimState,
        frame: &InputFrame,
        tag: ProcessTag,
    ) -> Result<OutputFrame, SimError> {
        self.check_frame(frame)?;
        state.last_changed.clear();
        let tb_events = 1 + self.apply_inputs(state, frame) as u64;
        let before = self.propagate(state)?;

        let scan = self.scan;
        for (k, cell) in scan.chain().iter().enumerate() {
            self.next_ff[k] = if frame.clr {
                false
            } else if frame.scan_enable {
                state.net_values[cell.scan_in.index()]
            } else {
                state.net_values[cell.d.index()]
            };
        }
        for (k, cell) in scan.chain().iter().enumerate() {
            let v = self.next_ff[k];
            state.ff_values[k] = v;
            if state.net_values[cell.q.index()] != v {
                state.net_values[cell.q.index()] = v;
                state.last_changed.push(cell.q);
            }
        }
        let after = self.propagate(state)?;

        let events = before.events + after.events;
        state.cclock_count += 1;
        state.event_count += events;
        state.attribution.add(ProcessTag::Dut, events);
        state.attribution.add(ProcessTag::ClockGen, 2);
        state.attribution.add(tag, tb_events);
        Ok(self.outputs(state))
    }

    pub fn outputs(&self, state: &SimState) -> OutputFrame {
        OutputFrame {
            primary_outputs: self
                .scan
                .base()
                .outputs()
                .iter()
                .map(|&o| state.net(o))
                .collect(),
            tdo: state.net(self.scan.tdo()),
        }
    }

    /// Overwrites the chain contents (chain order) and re-settles. Test and
    /// debug helper; the work is charged to the DUT.
    pub fn force_chain(&mut self, state: &mut SimState, values: &[bool]) -> Result<SettleReport, SimError> {
        if values.len() != self.scan.chain_length() {
            return Err(SimError::Width {
                what: "chain",
                expected: self.scan.chain_length(),
                got: values.len(),
            });
        }
        state.last_changed.clear();
        for (k, cell) in self.scan.chain().iter().enumerate() {
            state.ff_values[k] = values[k];
            if state.net_values[cell.q.index()] != values[k] {
                state.net_values[cell.q.index()] = values[k];
                state.last_changed.push(cell.q);
            }
        }
        let report = self.propagate(state)?;
        state.event_count += report.events;
        state.attribution.add(ProcessTag::Dut, report.events);
        Ok(report)
    }

    fn check_frame(&self, frame: &InputFrame) -> Result<(), SimError> {
        let expected = self.scan.base().inputs().len();
        if frame.primary_inputs.len() != expected {
            return Err(SimError::Width {
                what: "primary input",
                expected,
                got: frame.primary_inputs.len(),
            });
        }
        Ok(())
    }

    /// Writes the frame onto the input nets; returns how many changed.
    fn apply_inputs(&self, state: &mut SimState, frame: &InputFrame) -> usize {
        let scan = self.scan;
        let mut changed = 0;
        let mut set = |net: NetId, v: bool, state: &mut SimState| {
            if state.net_values[net.index()] != v {
                state.net_values[net.index()] = v;
                state.last_changed.push(net);
                changed += 1;
            }
        };
        for (&pi, &v) in scan.base().inputs().iter().zip(&frame.primary_inputs) {
            set(pi, v, state);
        }
        set(scan.tdi(), frame.tdi, state);
        set(scan.scan_enable(), frame.scan_enable, state);
        set(scan.clr(), frame.clr, state);
        set(scan.scan_test_mode(), frame.test_mode, state);
        changed
    }

    /// Settles the logic after the nets in `state.last_changed` (from index
    /// `seed_from` on) were written.
    fn propagate(&mut self, state: &mut SimState) -> Result<SettleReport, SimError> {
        let seeds = state.last_changed.len();
        let report = match self.options.engine {
            Engine::EventDriven => self.propagate_events(state, seeds),
            Engine::FullSweep => self.propagate_sweep(state),
        };
        if self.options.oracle_check && self.options.engine == Engine::EventDriven {
            self.cross_check(state)?;
        }
        Ok(report)
    }

    fn propagate_events(&mut self, state: &mut SimState, seeds: usize) -> SettleReport {
        let start = state.last_changed.len() - seeds.min(state.last_changed.len());
        let mut lowest = self.buckets.len();
        for i in start..state.last_changed.len() {
            let net = state.last_changed[i].index();
            for f in self.fan_start[net]..self.fan_start[net + 1] {
                let g = self.fanout[f as usize] as usize;
                if !self.queued[g] {
                    self.queued[g] = true;
                    let lvl = self.levels[g] as usize;
                    lowest = lowest.min(lvl);
                    self.buckets[lvl].push(g as u32);
                }
            }
        }

        let mut events = 0u64;
        let mut changed = 0usize;
        for lvl in lowest..self.buckets.len() {
            let mut i = 0;
            while i < self.buckets[lvl].len() {
                let g = self.buckets[lvl][i] as usize;
                i += 1;
                self.queued[g] = false;
                events += 1;
                let v = self.eval(&state.net_values, g);
                let out = self.outs[g] as usize;
                if state.net_values[out] != v {
                    state.net_values[out] = v;
                    state.last_changed.push(NetId(out as u32));
                    changed += 1;
                    for f in self.fan_start[out]..self.fan_start[out + 1] {
                        let r = self.fanout[f as usize] as usize;
                        if !self.queued[r] {
                            self.queued[r] = true;
                            self.buckets[self.levels[r] as usize].push(r as u32);
                        }
                    }
                }
            }
            self.buckets[lvl].clear();
        }
        SettleReport { events, changed }
    }

    fn propagate_sweep(&mut self, state: &mut SimState) -> SettleReport {
        let mut changed = 0;
        for idx in 0..self.order.len() {
            let g = self.order[idx] as usize;
            let v = self.eval(&state.net_values, g);
            let out = self.outs[g] as usize;
            if state.net_values[out] != v {
                state.net_values[out] = v;
                state.last_changed.push(NetId(out as u32));
                changed += 1;
            }
        }
        SettleReport {
            events: self.order.len() as u64,
            changed,
        }
    }

    fn cross_check(&mut self, state: &SimState) -> Result<(), SimError> {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.copy_from_slice(&state.net_values);
        self.sweep_into(&mut scratch, Some(state));
        let result = match scratch.iter().zip(&state.net_values).position(|(a, b)| a != b) {
            None => Ok(()),
            Some(net) => Err(SimError::EngineMismatch {
                net: self.scan.net_name(NetId(net as u32)).to_string(),
                cclock: state.cclock_count,
            }),
        };
        self.scratch = scratch;
        result
    }

    /// Recomputes every gate output in `values` from its sources. With a
    /// state given, flip-flop outputs are taken from its `ff_values`.
    fn sweep_into(&self, values: &mut [bool], state: Option<&SimState>) {
        if let Some(state) = state {
            for (k, cell) in self.scan.chain().iter().enumerate() {
                values[cell.q.index()] = state.ff_values[k];
            }
        }
        for &g in &self.order {
            let g = g as usize;
            values[self.outs[g] as usize] = self.eval(values, g);
        }
    }

    #[inline]
    fn eval(&self, values: &[bool], g: usize) -> bool {
        let (a, b) = (self.in_start[g] as usize, self.in_start[g + 1] as usize);
        self.kinds[g].eval(self.ins[a..b].iter().map(|&n| values[n as usize]))
    }
}

/// A simulator, its state and an optional waveform sink, bundled so that
/// testbenches and transactors can share one tick path.
pub struct Dut<'a> {
    pub sim: Simulator<'a>,
    pub state: SimState,
    vcd: Option<VcdRecorder<Box<dyn std::io::Write + Send>>>,
}

impl<'a> Dut<'a> {
    pub fn new(scan: &'a ScanNetlist, options: SimOptions) -> Self {
        let mut sim = Simulator::new(scan, options);
        let state = sim.reset_state();
        Dut {
            sim,
            state,
            vcd: None,
        }
    }

    /// Starts dumping every tick to `out`; time zero is the current state.
    pub fn record_waveform(&mut self, out: Box<dyn std::io::Write + Send>) -> Result<(), SimError> {
        let wave = |e: std::io::Error| SimError::Waveform(e.to_string());
        let mut vcd = VcdRecorder::new(out, self.sim.scan()).map_err(wave)?;
        vcd.record(self.state.cclock_count, &self.state).map_err(wave)?;
        self.vcd = Some(vcd);
        Ok(())
    }

    pub fn tick(&mut self, frame: &InputFrame, tag: ProcessTag) -> Result<OutputFrame, SimError> {
        let out = self.sim.tick(&mut self.state, frame, tag)?;
        if let Some(vcd) = &mut self.vcd {
            vcd.record(self.state.cclock_count, &self.state)
                .map_err(|e| SimError::Waveform(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn outputs(&self) -> OutputFrame {
        self.sim.outputs(&self.state)
    }

    pub fn n_inputs(&self) -> usize {
        self.sim.scan().base().inputs().len()
    }

    pub fn chain_length(&self) -> usize {
        self.sim.scan().chain_length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{insert_scan, ScanConfig};
    use crate::synth;

    fn scanned(n: crate::netlist::Netlist) -> ScanNetlist {
        insert_scan(n, &ScanConfig::default()).unwrap()
    }

    #[test]
    fn reset_state_is_settled_and_zeroed() {
        let scan = scanned(synth::counter(3));
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let st = sim.reset_state();
        assert!(st.ff_values.iter().all(|&v| !v));
        assert_eq!(st.cclock_count, 0);
        assert_eq!(st.event_count, 0);
        // HOLD=0, so EN=1 and ZERO=1.
        let base = scan.base();
        assert!(st.net(base.net("EN").unwrap()));
        assert_eq!(sim.outputs(&st).primary_outputs, vec![false, true]);
    }

    #[test]
    fn clear_dominates() {
        let scan = scanned(synth::counter(3));
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        sim.force_chain(&mut st, &[true, true, true]).unwrap();
        let frame = InputFrame {
            scan_enable: true,
            tdi: true,
            ..InputFrame::reset(1)
        };
        sim.tick(&mut st, &frame, ProcessTag::ResetSeq).unwrap();
        assert_eq!(st.ff_values, vec![false; 3]);
    }

    #[test]
    fn shift_reaches_tdo_after_n_ticks() {
        let scan = scanned(synth::counter(3));
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        let outs: Vec<bool> = [true, false, false]
            .iter()
            .map(|&b| sim.tick(&mut st, &InputFrame::shift(1, b), ProcessTag::ScanSeq).unwrap().tdo)
            .collect();
        assert_eq!(outs, vec![false, false, true]);
    }

    #[test]
    fn quiet_tick_costs_no_gate_events() {
        let scan = scanned(synth::s400_profile());
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        let frame = InputFrame::reset(3);
        sim.tick(&mut st, &frame, ProcessTag::ResetSeq).unwrap();
        let before = st.event_count;
        sim.tick(&mut st, &frame, ProcessTag::ResetSeq).unwrap();
        assert_eq!(st.event_count, before);
    }

    #[test]
    fn idle_settle_after_reset_is_free() {
        let scan = scanned(synth::counter(3));
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        let r = sim.settle(&mut st, &InputFrame::zeros(1)).unwrap();
        assert_eq!(r, SettleReport { events: 0, changed: 0 });
        assert!(st.last_changed.is_empty());
    }

    #[test]
    fn width_mismatch() {
        let scan = scanned(synth::counter(3));
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        let err = sim.tick(&mut st, &InputFrame::zeros(2), ProcessTag::ScanSeq).unwrap_err();
        assert_eq!(
            err,
            SimError::Width {
                what: "primary input",
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn attribution_accounts_for_every_event() {
        let scan = scanned(synth::s400_profile());
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        for i in 0..50 {
            let tag = if i % 7 == 0 { ProcessTag::ScanEnableSeq } else { ProcessTag::ScanSeq };
            let frame = if i % 7 == 0 { InputFrame::capture(3) } else { InputFrame::shift(3, i % 3 == 0) };
            sim.tick(&mut st, &frame, tag).unwrap();
        }
        assert_eq!(st.attribution.get(ProcessTag::Dut), st.event_count);
        assert_eq!(st.attribution.get(ProcessTag::ClockGen), 100);
        let tb: u64 = st.attribution.iter().filter(|(t, _)| t.is_testbench()).map(|(_, c)| c).sum();
        assert_eq!(st.attribution.total(), tb + st.event_count);
    }
}
