//! Synthetic sequential netlists.
//!
//! [`counter`] builds n-bit up-counters for chain-length sweeps. [`census`]
//! builds a random acyclic circuit with an exact gate census, and
//! [`s400_profile`] uses it to produce the bundled structural stand-in for
//! the ISCAS89 s400 benchmark (same I/O names and gate counts).

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netlist::{GateKind, Netlist, NetlistBuilder, NetlistError};

/// n-bit synchronous up-counter that counts while its `HOLD` input is low.
///
/// Flip-flop `Qi` holds bit `i` of the count. Outputs are `CARRY` (all ones)
/// and `ZERO` (all zeros).
pub fn counter(n: usize) -> Netlist {
    assert!(n >= 1, "counter needs at least one bit");
    let mut b = NetlistBuilder::new(format!("counter{n}"));
    b.input("HOLD", 0);
    b.output("CARRY", 0);
    b.output("ZERO", 0);
    let q: Vec<String> = (0..n).map(|i| format!("Q{i}")).collect();
    for (i, qi) in q.iter().enumerate() {
        b.dff(qi, &format!("D{i}"), 0);
    }
    b.gate(GateKind::Not, "EN", &["HOLD"], 0);
    let mut carry_in = "EN".to_string();
    for (i, qi) in q.iter().enumerate() {
        b.gate(GateKind::Xor, &format!("D{i}"), &[qi, &carry_in], 0);
        if i + 1 < n {
            let c = format!("C{i}");
            b.gate(GateKind::And, &c, &[qi, &carry_in], 0);
            carry_in = c;
        }
    }
    let refs: Vec<&str> = q.iter().map(String::as_str).collect();
    if n == 1 {
        b.gate(GateKind::Buf, "CARRY", &refs, 0);
        b.gate(GateKind::Not, "ZERO", &refs, 0);
    } else {
        b.gate(GateKind::And, "CARRY", &refs, 0);
        b.gate(GateKind::Nor, "ZERO", &refs, 0);
    }
    b.build().expect("counter netlist is well formed")
}

/// Shape of a census-constrained random circuit.
#[derive(Debug, Clone)]
pub struct CensusSpec {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub registers: Vec<String>,
    pub gates: Vec<(GateKind, usize)>,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CensusError {
    #[error("census `{name}`: no draw in {attempts} seeds leaves every net read")]
    Infeasible { name: String, attempts: u32 },
    #[error("census `{0}` needs at least one input or register")]
    NoSources(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Seeds tried before a census is declared infeasible.
pub const CENSUS_ATTEMPTS: u32 = 10_000;

/// Builds a random acyclic circuit whose gate counts match `spec.gates`
/// exactly. Every gate output is read by another gate, a flip-flop or a
/// primary output. Deterministic in `spec.seed`; if a draw leaves more
/// dangling nets than there are sinks, the next seed is tried.
pub fn census(spec: &CensusSpec) -> Result<Netlist, CensusError> {
    if spec.inputs.is_empty() && spec.registers.is_empty() {
        return Err(CensusError::NoSources(spec.name.clone()));
    }
    let mut seed = spec.seed;
    for _ in 0..CENSUS_ATTEMPTS {
        if let Some(netlist) = try_census(spec, seed)? {
            return Ok(netlist);
        }
        seed = seed.wrapping_add(1);
    }
    Err(CensusError::Infeasible {
        name: spec.name.clone(),
        attempts: CENSUS_ATTEMPTS,
    })
}

fn try_census(spec: &CensusSpec, seed: u64) -> Result<Option<Netlist>, NetlistError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kinds: Vec<GateKind> = spec
        .gates
        .iter()
        .flat_map(|&(k, count)| std::iter::repeat_n(k, count))
        .collect();
    kinds.shuffle(&mut rng);

    let mut sources: Vec<String> = spec.inputs.iter().chain(&spec.registers).cloned().collect();
    sources.shuffle(&mut rng);
    let mut avail: Vec<String> = sources.clone();
    let mut unused: VecDeque<String> = sources.into();
    let mut gates: Vec<(GateKind, String, Vec<String>)> = Vec::with_capacity(kinds.len());

    for (idx, kind) in kinds.into_iter().enumerate() {
        let fan_in = if kind.is_unary() {
            1
        } else {
            let drawn = match rng.gen_range(0..10) {
                0..=5 => 2,
                6..=8 => 3,
                _ => 4,
            };
            // Inputs are distinct, so a gate cannot read more nets than exist.
            drawn.min(avail.len()).max(2)
        };
        if fan_in > avail.len() {
            return Ok(None);
        }
        let mut ins: Vec<String> = Vec::with_capacity(fan_in);
        while ins.len() < fan_in {
            let take_unused = ins.is_empty() || rng.gen_bool(0.4);
            let pick = if take_unused && !unused.is_empty() {
                unused.pop_front().unwrap()
            } else {
                let window = avail.len().min(48);
                avail[avail.len() - 1 - rng.gen_range(0..window)].clone()
            };
            if !ins.contains(&pick) {
                unused.retain(|n| n != &pick);
                ins.push(pick);
            }
        }
        let out = format!("G{}", idx + 1);
        avail.push(out.clone());
        unused.push_back(out.clone());
        gates.push((kind, out, ins));
    }

    let n_sinks = spec.registers.len() + spec.outputs.len();
    let dangling_source = unused
        .iter()
        .any(|n| spec.inputs.contains(n) || spec.registers.contains(n));
    if unused.len() > n_sinks || dangling_source {
        return Ok(None);
    }
    let gate_nets: Vec<&String> = gates.iter().map(|(_, out, _)| out).collect();
    let mut sinks: Vec<String> = unused.into_iter().collect();
    // Extra sinks come from the later gates when there are enough of them.
    let free_from = |lo: usize| gate_nets[lo..].iter().filter(|g| !sinks.contains(g)).count();
    let need = n_sinks.saturating_sub(sinks.len());
    let lo = if free_from(gate_nets.len() / 2) >= need { gate_nets.len() / 2 } else { 0 };
    if free_from(lo) < need {
        return Ok(None);
    }
    while sinks.len() < n_sinks {
        let pick = gate_nets[rng.gen_range(lo..gate_nets.len())].clone();
        if !sinks.contains(&pick) {
            sinks.push(pick);
        }
    }
    sinks.shuffle(&mut rng);

    let mut b = NetlistBuilder::new(spec.name.clone());
    for pi in &spec.inputs {
        b.input(pi, 0);
    }
    let (d_nets, po_nets) = sinks.split_at(spec.registers.len());
    for (po, net) in spec.outputs.iter().zip(po_nets) {
        b.output(po, 0);
        b.gate(GateKind::Buf, po, &[net], 0);
    }
    for (q, d) in spec.registers.iter().zip(d_nets) {
        b.dff(q, d, 0);
    }
    for (kind, out, ins) in &gates {
        let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
        b.gate(*kind, out, &refs, 0);
    }
    let netlist = b.build()?;
    Ok(Some(strip_output_buffers(netlist, spec)))
}

/// The generator routes primary outputs through buffers so that any net
/// can be exported; the buffers are folded away again so the census stays
/// exact.
fn strip_output_buffers(netlist: Netlist, spec: &CensusSpec) -> Netlist {
    let mut rename: std::collections::HashMap<String, String> = Default::default();
    for po in &spec.outputs {
        let id = netlist.net(po).expect("output exists");
        if let crate::netlist::Driver::Gate(g) = netlist.driver(id) {
            let src = netlist.gates()[g].inputs[0];
            rename.insert(netlist.net_name(src).to_string(), po.clone());
        }
    }
    let name = |id| {
        let n = netlist.net_name(id);
        rename.get(n).cloned().unwrap_or_else(|| n.to_string())
    };
    let mut b = NetlistBuilder::new(netlist.name().to_string());
    for &pi in netlist.inputs() {
        b.input(&name(pi), 0);
    }
    for &po in netlist.outputs() {
        b.output(netlist.net_name(po), 0);
    }
    for dff in netlist.dffs() {
        b.dff(&name(dff.q), &name(dff.d), 0);
    }
    for gate in netlist.gates() {
        let out = netlist.net_name(gate.output);
        if gate.kind == GateKind::Buf && spec.outputs.iter().any(|p| p == out) {
            continue;
        }
        let ins: Vec<String> = gate.inputs.iter().map(|&i| name(i)).collect();
        let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
        b.gate(gate.kind, &name(gate.output), &refs, 0);
    }
    b.build().expect("renamed netlist stays well formed")
}

/// Census of the ISCAS89 s400 traffic-light controller: 3 inputs, 6 outputs,
/// 21 flip-flops, 58 inverters, 11 AND, 36 NAND, 25 OR and 34 NOR gates.
pub fn s400_census_spec() -> CensusSpec {
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    CensusSpec {
        name: "s400".into(),
        inputs: names(&["FM", "TEST", "CLR"]),
        outputs: names(&["GRN2", "YLW2", "RED2", "GRN1", "YLW1", "RED1"]),
        registers: (1..=21).map(|i| format!("R{i:02}")).collect(),
        gates: vec![
            (GateKind::Not, 58),
            (GateKind::And, 11),
            (GateKind::Nand, 36),
            (GateKind::Or, 25),
            (GateKind::Nor, 34),
        ],
        seed: 400,
    }
}

/// Structural stand-in for s400 (see [`s400_census_spec`]).
pub fn s400_profile() -> Netlist {
    census(&s400_census_spec()).expect("census generator output is well formed")
}
