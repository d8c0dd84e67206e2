//! Independent oracles shared by the integration tests. Nothing in here
//! goes through the library's parser, levelizer or simulator.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

pub fn data_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(file)
}

/// Small fixtures (chain length ≤ 4) in `data/`.
pub const SMALL_FIXTURES: [&str; 3] = ["toggle1.bench", "counter3.bench", "lfsr4.bench"];

/// A `.bench` netlist as plain strings.
#[derive(Debug, Clone)]
pub struct RawBench {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// `(q, d)` in declaration order.
    pub dffs: Vec<(String, String)>,
    /// output net -> (keyword, inputs)
    pub gates: HashMap<String, (String, Vec<String>)>,
}

impl RawBench {
    pub fn parse(text: &str) -> RawBench {
        let mut raw = RawBench {
            inputs: Vec::new(),
            outputs: Vec::new(),
            dffs: Vec::new(),
            gates: HashMap::new(),
        };
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let inner = |s: &str| s[s.find('(').unwrap() + 1..s.rfind(')').unwrap()].trim().to_string();
            if let Some((lhs, rhs)) = line.split_once('=') {
                let lhs = lhs.trim().to_string();
                let rhs = rhs.trim();
                let kw = rhs[..rhs.find('(').unwrap()].trim().to_ascii_uppercase();
                let args: Vec<String> = inner(rhs).split(',').map(|a| a.trim().to_string()).collect();
                if kw == "DFF" {
                    raw.dffs.push((lhs, args[0].clone()));
                } else {
                    raw.gates.insert(lhs, (kw, args));
                }
            } else if line.to_ascii_uppercase().starts_with("INPUT") {
                raw.inputs.push(inner(line));
            } else {
                raw.outputs.push(inner(line));
            }
        }
        raw
    }

    pub fn load(file: &str) -> RawBench {
        RawBench::parse(&std::fs::read_to_string(data_path(file)).unwrap())
    }

    /// Evaluates `net` given values of every source (inputs and flop
    /// outputs), by plain recursion with memoization.
    pub fn eval(&self, net: &str, sources: &HashMap<String, bool>, memo: &mut HashMap<String, bool>) -> bool {
        if let Some(&v) = sources.get(net) {
            return v;
        }
        if let Some(&v) = memo.get(net) {
            return v;
        }
        let (kw, args) = &self.gates[net];
        let vals: Vec<bool> = args.iter().map(|a| self.eval(a, sources, memo)).collect();
        let ones = vals.iter().filter(|&&v| v).count();
        let v = match kw.as_str() {
            "AND" => ones == vals.len(),
            "NAND" => ones != vals.len(),
            "OR" => ones > 0,
            "NOR" => ones == 0,
            "XOR" => ones % 2 == 1,
            "XNOR" => ones % 2 == 0,
            "NOT" | "INV" => !vals[0],
            "BUF" | "BUFF" => vals[0],
            other => panic!("oracle: unknown gate {other}"),
        };
        memo.insert(net.to_string(), v);
        v
    }

    /// Functional next state of every flop from `state` (declaration
    /// order) with all primary inputs low.
    pub fn next_state(&self, state: &[bool]) -> Vec<bool> {
        let mut sources: HashMap<String, bool> = self.inputs.iter().map(|i| (i.clone(), false)).collect();
        for ((q, _), &v) in self.dffs.iter().zip(state) {
            sources.insert(q.clone(), v);
        }
        let mut memo = HashMap::new();
        self.dffs.iter().map(|(_, d)| self.eval(d, &sources, &mut memo)).collect()
    }

    /// Expected scan-out for vector `v` on a declaration-order chain: the
    /// vector is shifted in LSB first, so bit `i` lands at position
    /// `n-1-i`; after capture, response bit `i` is the value at position
    /// `n-1-i` (the TDO end drains first).
    pub fn capture_response(&self, v: u64) -> Vec<bool> {
        let n = self.dffs.len();
        let mut state = vec![false; n];
        for i in 0..n {
            state[n - 1 - i] = v >> i & 1 == 1;
        }
        let captured = self.next_state(&state);
        (0..n).map(|i| captured[n - 1 - i]).collect()
    }

    /// Nets that can change when `net` changes (excluding flop outputs,
    /// which only change on a clock edge).
    pub fn transitive_fanout(&self, net: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![net.to_string()];
        while let Some(x) = stack.pop() {
            for (out, (_, args)) in &self.gates {
                if args.contains(&x) && seen.insert(out.clone()) {
                    stack.push(out.clone());
                }
            }
        }
        seen
    }
}

/// Shift-register model of an n-cell chain: shifting `bits` in at TDI and
/// reading TDO before each edge.
pub fn shift_register_out(state: &mut [bool], bits: &[bool]) -> Vec<bool> {
    let n = state.len();
    bits.iter()
        .map(|&b| {
            let out = state[n - 1];
            state.rotate_right(1);
            state[0] = b;
            out
        })
        .collect()
}

pub mod handshake {
    //! Randomized bridge schedules for the handshake properties.

    use std::collections::VecDeque;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use scanemu::bridge::{Bridge, BridgeConfig, BridgeError, ClockParams, Message, Transactor};
    use scanemu::scan::{insert_scan, ScanConfig};
    use scanemu::sim::{Dut, SimOptions};

    /// Relays in-messages to the out-port one per granted cclock, with
    /// every readiness signal redrawn at random on each edge.
    struct Relay {
        width: usize,
        capacity: usize,
        rng: ChaCha8Rng,
        odds: (f64, f64, f64),
        now: (bool, bool, bool),
        queue: VecDeque<Message>,
        pending: Option<Message>,
        grants: u64,
        violations: u64,
    }

    impl Relay {
        fn now(&self) -> (bool, bool, bool) {
            self.now
        }

        /// Draws the readiness of the next edge.
        fn advance(&mut self) {
            let (a, b, c) = self.odds;
            self.now = (self.rng.gen_bool(a), self.rng.gen_bool(b), self.rng.gen_bool(c));
        }
    }

    impl Transactor for Relay {
        fn in_widths(&self) -> Vec<usize> {
            vec![self.width]
        }
        fn out_widths(&self) -> Vec<usize> {
            vec![self.width]
        }
        fn reset(&mut self) {
            self.advance();
        }
        fn in_ready(&self, _: usize) -> bool {
            self.now().0 && self.queue.len() < self.capacity
        }
        fn accept(&mut self, _: usize, msg: Message) -> Result<(), BridgeError> {
            self.queue.push_back(msg);
            Ok(())
        }
        fn out_offer(&self, _: usize) -> Option<&Message> {
            if self.now().2 {
                self.pending.as_ref()
            } else {
                None
            }
        }
        fn out_taken(&mut self, _: usize) {
            self.pending = None;
        }
        fn ready_for_cclock(&self) -> bool {
            self.now().1
        }
        fn clock(&mut self, granted: bool, _: &mut Dut<'_>) -> Result<(), BridgeError> {
            if granted {
                self.grants += 1;
                if !self.ready_for_cclock() {
                    self.violations += 1;
                }
                if self.pending.is_none() {
                    self.pending = self.queue.pop_front();
                }
            }
            self.advance();
            Ok(())
        }
    }

    #[derive(Debug, Default)]
    pub struct ScheduleReport {
        pub messages: usize,
        pub grants: u64,
        pub uclocks: u64,
    }

    /// Runs one random schedule; `Err` describes the first violation.
    pub fn run_schedule(seed: u64) -> Result<ScheduleReport, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scan = insert_scan(scanemu::synth::counter(1), &ScanConfig::default()).unwrap();
        let den = rng.gen_range(1..=4u32);
        let config = BridgeConfig {
            clock: ClockParams {
                ratio_num: rng.gen_range(1..=den),
                ratio_den: den,
                phase: rng.gen_range(0..4),
                reset_cycles: rng.gen_range(0..10),
                ..ClockParams::default()
            },
            record_edges: true,
            ..BridgeConfig::default()
        };
        let width = rng.gen_range(1..=96usize);
        let p_in = rng.gen_range(0.2..1.0);
        let p_rfc = rng.gen_range(0.2..1.0);
        let p_out = rng.gen_range(0.2..1.0);
        let relay = Relay {
            width,
            capacity: rng.gen_range(1..4),
            rng: ChaCha8Rng::seed_from_u64(rng.gen()),
            odds: (p_in, p_rfc, p_out),
            now: (false, false, false),
            queue: VecDeque::new(),
            pending: None,
            grants: 0,
            violations: 0,
        };
        let mut bridge = Bridge::new(relay, Dut::new(&scan, SimOptions::default()), config).map_err(|e| e.to_string())?;

        let total = rng.gen_range(1..40usize);
        let sent: Vec<Message> = (0..total)
            .map(|_| Message::from_bits(&(0..width).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>()).unwrap())
            .collect();
        let mut next = 0;
        let mut received = Vec::new();
        let budget = 200_000u64;
        while received.len() < total {
            if next < total && rng.gen_bool(0.5) {
                bridge.send(0, sent[next].clone()).map_err(|e| e.to_string())?;
                next += 1;
            }
            bridge.step().map_err(|e| e.to_string())?;
            if rng.gen_bool(0.7) {
                while let Some(m) = bridge.recv(0) {
                    received.push(m);
                }
            }
            if bridge.stats().uclocks > budget {
                return Err(format!("seed {seed}: no progress after {budget} uclocks"));
            }
        }

        if received != sent {
            return Err(format!("seed {seed}: messages lost or reordered"));
        }
        for e in bridge.edge_log() {
            if e.granted && (!e.ready_for_cclock || e.ureset) {
                return Err(format!("seed {seed}: cclock granted on uclock {} while not ready", e.uclock));
            }
        }
        let stats = bridge.stats();
        let relay = bridge.transactor();
        if relay.violations > 0 {
            return Err(format!("seed {seed}: {} grants while the transactor was not ready", relay.violations));
        }
        if relay.grants != stats.cclocks {
            return Err(format!("seed {seed}: cclock counter {} vs {} grants", stats.cclocks, relay.grants));
        }
        if stats.hw_reads != total as u64 || stats.hw_writes != total as u64 {
            return Err(format!("seed {seed}: counters {stats:?} for {total} messages"));
        }
        Ok(ScheduleReport {
            messages: total,
            grants: relay.grants,
            uclocks: stats.uclocks,
        })
    }
}
