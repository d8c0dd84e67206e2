//! Software-side testbench: test sequences, the four run modes, and golden
//! logs.
//!
//! Every run performs the same plan:
//!
//! 1. **Reset toggle**: one CLR cycle, then a full scan-out that must read
//!    n zeros.
//! 2. **Scan-enable toggle**: shift a single 1 followed by zeros; TDO must
//!    pulse exactly once, after the n-th shift.
//! 3. **Scan sequence**: for each vector, n shifts (LSB first) and one
//!    capture; the response of vector k is shifted out while vector k+1 is
//!    shifted in. A final flush of n zero shifts drains the last response.
//!
//! The response bit observed on shift i is TDO just before that shift's
//! clock edge. What was shifted out during vector 0 is the chain as left by
//! the preamble; it goes to a side channel, not the golden log.
//!
//! [`Mode::Direct`], [`Mode::Acceleration`] and [`Mode::EmulPassThrough`]
//! sequence individual DUT cycles from software; [`Mode::EmulFsm`] sends one
//! message per vector and lets the transactor sequence the cycles.

mod golden;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bridge::{Bridge, BridgeConfig, BridgeError, Message};
use crate::metrics::{attribution_percentages, estimate_time, CostModel, MetricsError, RunStats};
use crate::scan::ScanNetlist;
use crate::sim::{Attribution, Dut, InputFrame, ProcessTag, SimError, SimOptions};
use crate::transactor::fsm::{self, VectorControls};
use crate::transactor::{FsmState, PassThroughState, PinCommand};

pub use golden::{compare_golden, Comparison, GoldenLog};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("reset check failed: chain position {position} reads 1 after reset")]
    ResetCheck { position: usize },
    #[error("scan-enable toggle failed: TDO pulsed on shift cycles {pulses:?}, expected only {expected}")]
    ToggleCheck { pulses: Vec<usize>, expected: usize },
    #[error("{count} vectors requested but a chain of {n} only has {max}")]
    VectorCount { count: u64, n: usize, max: u64 },
    #[error("vector {value:#x} does not fit in a chain of {n}")]
    VectorValue { value: u64, n: usize },
    #[error("golden log line {line}: {message}")]
    GoldenFormat { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "direct")]
    Direct,
    #[serde(rename = "acceleration")]
    Acceleration,
    #[serde(rename = "emul-pass")]
    EmulPassThrough,
    #[serde(rename = "emul-fsm")]
    EmulFsm,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Direct, Mode::Acceleration, Mode::EmulPassThrough, Mode::EmulFsm];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Acceleration => "acceleration",
            Mode::EmulPassThrough => "emul-pass",
            Mode::EmulFsm => "emul-fsm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Mode::Direct),
            "acceleration" | "accel" => Ok(Mode::Acceleration),
            "emul-pass" | "emul-passthrough" | "passthrough" => Ok(Mode::EmulPassThrough),
            "emul-fsm" | "fsm" => Ok(Mode::EmulFsm),
            _ => Err(format!(
                "unknown mode `{s}` (expected direct, acceleration, emul-pass or emul-fsm)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VectorSource {
    /// k = 0, 1, 2, ...
    Counting,
    Explicit(Vec<u64>),
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPlan {
    pub mode: Mode,
    pub vector_count: u64,
    pub vector_source: VectorSource,
    pub record_golden: Option<PathBuf>,
    pub compare_golden: Option<PathBuf>,
}

impl TestPlan {
    /// Counting source over `vector_count` vectors.
    pub fn new(mode: Mode, vector_count: u64) -> Self {
        TestPlan {
            mode,
            vector_count,
            vector_source: VectorSource::Counting,
            record_golden: None,
            compare_golden: None,
        }
    }

    /// Every one of the 2ⁿ chain states.
    pub fn full(mode: Mode, n: usize) -> Self {
        TestPlan::new(mode, 1u64 << n.min(63))
    }

    pub fn explicit(mode: Mode, vectors: Vec<u64>) -> Self {
        TestPlan {
            vector_count: vectors.len() as u64,
            vector_source: VectorSource::Explicit(vectors),
            ..TestPlan::new(mode, 0)
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        TestPlan { mode, ..self.clone() }
    }

    pub fn validate(&self, n: usize) -> Result<(), HarnessError> {
        let fits = |v: u64| n >= 64 || v >> n == 0;
        match &self.vector_source {
            VectorSource::Counting => {
                if n < 64 && self.vector_count > 1u64 << n {
                    return Err(HarnessError::VectorCount {
                        count: self.vector_count,
                        n,
                        max: 1 << n,
                    });
                }
            }
            VectorSource::Explicit(list) => {
                if let Some(&value) = list.iter().find(|&&v| !fits(v)) {
                    return Err(HarnessError::VectorValue { value, n });
                }
                if self.vector_count > list.len() as u64 {
                    return Err(HarnessError::VectorCount {
                        count: self.vector_count,
                        n,
                        max: list.len() as u64,
                    });
                }
            }
            VectorSource::Random { .. } => {}
        }
        Ok(())
    }

    pub fn vectors(&self, n: usize) -> VectorStream<'_> {
        VectorStream {
            source: &self.vector_source,
            mask: if n >= 64 { u64::MAX } else { (1u64 << n) - 1 },
            rng: match self.vector_source {
                VectorSource::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
                _ => None,
            },
            next: 0,
            count: self.vector_count,
        }
    }
}

pub struct VectorStream<'a> {
    source: &'a VectorSource,
    mask: u64,
    rng: Option<ChaCha8Rng>,
    next: u64,
    count: u64,
}

impl Iterator for VectorStream<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= self.count {
            return None;
        }
        let k = self.next;
        self.next += 1;
        Some(match self.source {
            VectorSource::Counting => k,
            VectorSource::Explicit(list) => list[k as usize],
            VectorSource::Random { .. } => self.rng.as_mut().expect("seeded").gen::<u64>() & self.mask,
        })
    }
}

/// `value` as n shift bits, least significant first (the first bit shifted
/// in ends up at the far end of the chain).
pub fn vector_bits(value: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| i < 64 && value >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub sim: SimOptions,
    pub bridge: BridgeConfig,
    pub cost: CostModel,
    /// VCD dump of every DUT tick.
    pub waveform: Option<PathBuf>,
}

/// What the two preamble tests observed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PreambleReport {
    /// Chain contents read out after reset, first bit out first.
    pub reset_scan_out: Vec<bool>,
    /// Shift cycles (1-based) after which TDO was 1 during the toggle.
    pub toggle_pulses: Vec<usize>,
}

impl PreambleReport {
    pub fn check(&self, n: usize) -> Result<(), HarnessError> {
        if let Some(position) = self.reset_scan_out.iter().position(|&b| b) {
            return Err(HarnessError::ResetCheck { position });
        }
        if self.toggle_pulses != [n] {
            return Err(HarnessError::ToggleCheck {
                pulses: self.toggle_pulses.clone(),
                expected: n,
            });
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub golden: GoldenLog,
    /// Responses discarded from the golden log (what vector 0's shifts
    /// pushed out).
    pub side_channel: Vec<Vec<bool>>,
    pub preamble: PreambleReport,
    pub stats: RunStats,
    /// Raw per-process event counts behind `stats.attribution`.
    pub events_by_process: Attribution,
    /// Controlled clocks spent in the scan sequence (excluding preamble).
    pub scan_cclocks: u64,
    /// Bridge reads during the scan sequence (excluding preamble).
    pub scan_hw_reads: u64,
    pub comparison: Option<Comparison>,
}

/// Drives one DUT cycle and reports TDO after its clock edge.
trait CycleDriver {
    fn cycle(&mut self, frame: &InputFrame, tag: ProcessTag) -> Result<bool, HarnessError>;
    fn cclocks(&self) -> u64;
    fn hw_reads(&self) -> u64 {
        0
    }
}

struct SimDriver<'a> {
    dut: Dut<'a>,
}

impl CycleDriver for SimDriver<'_> {
    fn cycle(&mut self, frame: &InputFrame, tag: ProcessTag) -> Result<bool, HarnessError> {
        Ok(self.dut.tick(frame, tag)?.tdo)
    }

    fn cclocks(&self) -> u64 {
        self.dut.state.cclock_count
    }
}

struct PassDriver<'a> {
    bridge: Bridge<'a, PassThroughState>,
    software: Attribution,
}

impl CycleDriver for PassDriver<'_> {
    fn cycle(&mut self, frame: &InputFrame, tag: ProcessTag) -> Result<bool, HarnessError> {
        self.software.add(tag, 1);
        self.software.add(ProcessTag::BridgeMessage, 2);
        let reply = self.bridge.transact(0, PinCommand::from_frame(frame).encode(), 0)?;
        Ok(reply.bit(0))
    }

    fn cclocks(&self) -> u64 {
        self.bridge.stats().cclocks
    }

    fn hw_reads(&self) -> u64 {
        self.bridge.stats().hw_reads
    }
}

/// Testbench that sequences every DUT cycle itself.
struct CycleBench<D> {
    driver: D,
    n: usize,
    n_inputs: usize,
    /// TDO after the most recent edge, i.e. before the next one.
    tdo: bool,
}

impl<D: CycleDriver> CycleBench<D> {
    fn step(&mut self, frame: &InputFrame, tag: ProcessTag) -> Result<bool, HarnessError> {
        let before = self.tdo;
        self.tdo = self.driver.cycle(frame, tag)?;
        Ok(before)
    }

    fn run_reset_toggle(&mut self) -> Result<Vec<bool>, HarnessError> {
        self.step(&InputFrame::reset(self.n_inputs), ProcessTag::ResetSeq)?;
        (0..self.n)
            .map(|_| self.step(&InputFrame::shift(self.n_inputs, false), ProcessTag::ResetSeq))
            .collect()
    }

    fn run_scan_enable_toggle(&mut self) -> Result<Vec<usize>, HarnessError> {
        let mut pulses = Vec::new();
        for cycle in 1..=self.n {
            self.step(&InputFrame::shift(self.n_inputs, cycle == 1), ProcessTag::ScanEnableSeq)?;
            if self.tdo {
                pulses.push(cycle);
            }
        }
        Ok(pulses)
    }

    fn run_scan_sequence(
        &mut self,
        vectors: impl Iterator<Item = u64>,
        golden: &mut GoldenLog,
        side: &mut Vec<Vec<bool>>,
    ) -> Result<(), HarnessError> {
        let mut any = false;
        for v in vectors {
            let bits = vector_bits(v, self.n);
            let mut resp = Vec::with_capacity(self.n);
            for &b in &bits {
                resp.push(self.step(&InputFrame::shift(self.n_inputs, b), ProcessTag::ScanSeq)?);
            }
            if any {
                golden.push(resp);
            } else {
                side.push(resp);
            }
            any = true;
            self.step(&InputFrame::capture(self.n_inputs), ProcessTag::ScanEnableSeq)?;
        }
        if any {
            let resp = (0..self.n)
                .map(|_| self.step(&InputFrame::shift(self.n_inputs, false), ProcessTag::ScanSeq))
                .collect::<Result<Vec<_>, _>>()?;
            golden.push(resp);
        }
        Ok(())
    }
}

/// Testbench that hands whole vectors to the FSM transactor.
struct VectorBench<'a> {
    bridge: Bridge<'a, FsmState>,
    software: Attribution,
    n: usize,
}

impl VectorBench<'_> {
    fn send(&mut self, port: usize, msg: Message, tag: ProcessTag) -> Result<Vec<bool>, HarnessError> {
        self.software.add(tag, 1);
        self.software.add(ProcessTag::BridgeMessage, 2);
        Ok(self.bridge.transact(port, msg, 0)?.to_bits())
    }

    fn vector(&mut self, bits: &[bool], controls: VectorControls, tag: ProcessTag) -> Result<Vec<bool>, HarnessError> {
        let msg = fsm::vector_message(self.n, bits, controls)?;
        self.send(fsm::VECTOR_PORT, msg, tag)
    }

    /// n+1 cleared cycles; whatever the chain held before is shifted out and
    /// dropped.
    fn run_reset_toggle(&mut self) -> Result<(), HarnessError> {
        self.bridge.finish_reset()?;
        let zeros = vec![false; self.n];
        let controls = VectorControls {
            clr: true,
            ..VectorControls::default()
        };
        self.vector(&zeros, controls, ProcessTag::ResetSeq)?;
        Ok(())
    }

    /// Shifts in a lone 1. The scan-out doubles as the post-reset check;
    /// bit n of the reply is TDO after the n-th shift.
    fn run_scan_enable_toggle(&mut self) -> Result<PreambleReport, HarnessError> {
        let mut marker = vec![false; self.n];
        marker[0] = true;
        let reply = self.vector(&marker, VectorControls::default(), ProcessTag::ScanEnableSeq)?;
        let reset_scan_out = reply[..self.n].to_vec();
        // Post-edge TDO of shift c is the pre-edge sample of shift c+1.
        let toggle_pulses = (1..=self.n).filter(|&c| reply[c]).collect();
        Ok(PreambleReport {
            reset_scan_out,
            toggle_pulses,
        })
    }

    fn run_scan_sequence(
        &mut self,
        vectors: impl Iterator<Item = u64>,
        golden: &mut GoldenLog,
        side: &mut Vec<Vec<bool>>,
    ) -> Result<(), HarnessError> {
        let mut any = false;
        for v in vectors {
            let bits = vector_bits(v, self.n);
            let mut reply = self.vector(&bits, VectorControls::default(), ProcessTag::ScanSeq)?;
            reply.truncate(self.n);
            if any {
                golden.push(reply);
            } else {
                side.push(reply);
            }
            any = true;
        }
        if any {
            let trigger = Message::from_u64(1, 1)?;
            let mut reply = self.send(fsm::FLUSH_PORT, trigger, ProcessTag::ScanSeq)?;
            reply.truncate(self.n);
            golden.push(reply);
        }
        Ok(())
    }
}

struct Raw {
    golden: GoldenLog,
    side: Vec<Vec<bool>>,
    preamble: PreambleReport,
    counts: Attribution,
    uclocks: u64,
    cclocks: u64,
    hw_reads: u64,
    hw_writes: u64,
    signal_transfers: u64,
    scan_cclocks: u64,
    scan_hw_reads: u64,
}

/// Runs the full plan (preamble, scan sequence, golden record/compare) in
/// the plan's mode.
pub fn run_plan(scan: &ScanNetlist, plan: &TestPlan, opts: &RunOptions) -> Result<RunOutcome, HarnessError> {
    let n = scan.chain_length();
    plan.validate(n)?;
    opts.cost.validate()?;
    let started = Instant::now();

    let mut dut = Dut::new(scan, opts.sim);
    if let Some(path) = &opts.waveform {
        let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
        dut.record_waveform(Box::new(std::io::BufWriter::new(file)))?;
    }
    let raw = match plan.mode {
        Mode::Direct | Mode::Acceleration => run_cycle_level(SimDriver { dut }, scan, plan)?,
        Mode::EmulPassThrough => {
            let xtor = PassThroughState::for_dut(&dut);
            let mut driver = PassDriver {
                bridge: Bridge::new(xtor, dut, opts.bridge)?,
                software: Attribution::default(),
            };
            driver.bridge.finish_reset()?;
            run_cycle_level(driver, scan, plan)?
        }
        Mode::EmulFsm => run_vector_level(dut, scan, plan, opts)?,
    };

    let mut stats = RunStats {
        mode: plan.mode,
        n,
        vectors: plan.vector_count,
        uclocks: raw.uclocks,
        cclocks: raw.cclocks,
        hw_reads: raw.hw_reads,
        hw_writes: raw.hw_writes,
        signal_transfers: raw.signal_transfers,
        events: raw.counts.total(),
        attribution: attribution_percentages(&raw.counts),
        wall_seconds: started.elapsed().as_secs_f64(),
        estimated_seconds: 0.0,
    };
    stats.estimated_seconds = estimate_time(&stats, &opts.cost);

    if let Some(path) = &plan.record_golden {
        raw.golden.write(path)?;
    }
    let comparison = match &plan.compare_golden {
        Some(path) => Some(compare_golden(&raw.golden, &GoldenLog::read(path)?)),
        None => None,
    };

    Ok(RunOutcome {
        golden: raw.golden,
        side_channel: raw.side,
        preamble: raw.preamble,
        stats,
        events_by_process: raw.counts,
        scan_cclocks: raw.scan_cclocks,
        scan_hw_reads: raw.scan_hw_reads,
        comparison,
    })
}

fn run_cycle_level<D>(driver: D, scan: &ScanNetlist, plan: &TestPlan) -> Result<Raw, HarnessError>
where
    D: CycleDriver + IntoRaw,
{
    let n = scan.chain_length();
    let mut bench = CycleBench {
        driver,
        n,
        n_inputs: scan.base().inputs().len(),
        tdo: false,
    };
    let reset_scan_out = bench.run_reset_toggle()?;
    let toggle_pulses = bench.run_scan_enable_toggle()?;
    let preamble = PreambleReport {
        reset_scan_out,
        toggle_pulses,
    };
    preamble.check(n)?;

    let (c0, r0) = (bench.driver.cclocks(), bench.driver.hw_reads());
    let mut golden = GoldenLog::new(n);
    let mut side = Vec::new();
    bench.run_scan_sequence(plan.vectors(n), &mut golden, &mut side)?;
    let (scan_cclocks, scan_hw_reads) = (bench.driver.cclocks() - c0, bench.driver.hw_reads() - r0);

    let mut raw = bench.driver.into_raw(scan, plan.mode);
    raw.golden = golden;
    raw.side = side;
    raw.preamble = preamble;
    raw.scan_cclocks = scan_cclocks;
    raw.scan_hw_reads = scan_hw_reads;
    Ok(raw)
}

fn run_vector_level(dut: Dut<'_>, scan: &ScanNetlist, plan: &TestPlan, opts: &RunOptions) -> Result<Raw, HarnessError> {
    let n = scan.chain_length();
    let xtor = FsmState::for_dut(&dut);
    let mut bench = VectorBench {
        bridge: Bridge::new(xtor, dut, opts.bridge)?,
        software: Attribution::default(),
        n,
    };
    bench.run_reset_toggle()?;
    let preamble = bench.run_scan_enable_toggle()?;
    preamble.check(n)?;

    let before = bench.bridge.stats();
    let mut golden = GoldenLog::new(n);
    let mut side = Vec::new();
    bench.run_scan_sequence(plan.vectors(n), &mut golden, &mut side)?;
    let stats = bench.bridge.stats();
    Ok(Raw {
        golden,
        side,
        preamble,
        counts: bench.software,
        uclocks: stats.uclocks,
        cclocks: stats.cclocks,
        hw_reads: stats.hw_reads,
        hw_writes: stats.hw_writes,
        signal_transfers: 0,
        scan_cclocks: stats.cclocks - before.cclocks,
        scan_hw_reads: stats.hw_reads - before.hw_reads,
    })
}

/// Turns a finished driver into mode-specific counters.
trait IntoRaw {
    fn into_raw(self, scan: &ScanNetlist, mode: Mode) -> Raw;
}

fn empty_raw(n: usize) -> Raw {
    Raw {
        golden: GoldenLog::new(n),
        side: Vec::new(),
        preamble: PreambleReport::default(),
        counts: Attribution::default(),
        uclocks: 0,
        cclocks: 0,
        hw_reads: 0,
        hw_writes: 0,
        signal_transfers: 0,
        scan_cclocks: 0,
        scan_hw_reads: 0,
    }
}

impl IntoRaw for SimDriver<'_> {
    fn into_raw(self, scan: &ScanNetlist, mode: Mode) -> Raw {
        let state = &self.dut.state;
        let cycles = state.cclock_count;
        let mut raw = empty_raw(scan.chain_length());
        raw.cclocks = cycles;
        if mode == Mode::Acceleration {
            // The DUT's events happen in hardware; the simulator keeps the
            // testbench plus one link synchronisation per cycle.
            for (tag, c) in state.attribution.iter() {
                if tag != ProcessTag::Dut {
                    raw.counts.add(tag, c);
                }
            }
            raw.counts.add(ProcessTag::BridgeSignal, cycles);
            let (ins, outs) = scan.boundary_io();
            raw.signal_transfers = cycles * (ins + outs) as u64;
        } else {
            raw.counts = state.attribution;
        }
        raw
    }
}

impl IntoRaw for PassDriver<'_> {
    fn into_raw(self, scan: &ScanNetlist, _: Mode) -> Raw {
        let stats = self.bridge.stats();
        let mut raw = empty_raw(scan.chain_length());
        raw.counts = self.software;
        raw.uclocks = stats.uclocks;
        raw.cclocks = stats.cclocks;
        raw.hw_reads = stats.hw_reads;
        raw.hw_writes = stats.hw_writes;
        raw
    }
}

/// Runs several plans concurrently, one thread per plan. Results come back
/// in input order and are identical to running them one by one.
pub fn run_plans(scan: &ScanNetlist, jobs: &[(TestPlan, RunOptions)]) -> Vec<Result<RunOutcome, HarnessError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(plan, opts)| s.spawn(move || run_plan(scan, plan, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    })
}
