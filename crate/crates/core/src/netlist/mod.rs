//! Gate-level netlists in the ISCAS89 `.bench` dialect.
//!
//! A [`Netlist`] is immutable once built. Every net has exactly one driver
//! (a primary input, a gate output or a flip-flop output) and the
//! combinational part is acyclic, so a single pass over the
//! [`schedule`](Netlist::schedule) settles every net.

mod emit;
mod levelize;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use emit::emit_bench;
pub use levelize::{levelize, Schedule};
pub use parse::parse_bench;

/// Index of a net inside its netlist's symbol table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Not,
    Buf,
    Xor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Xor,
        GateKind::Xnor,
    ];

    /// Parses a `.bench` gate keyword. Case-insensitive; `INV` and `BUFF`
    /// are accepted as synonyms of `NOT` and `BUF`.
    pub fn from_keyword(word: &str) -> Option<GateKind> {
        let kind = match word.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            _ => return None,
        };
        Some(kind)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUFF",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Not | GateKind::Buf)
    }

    pub fn arity_ok(self, n: usize) -> bool {
        if self.is_unary() {
            n == 1
        } else {
            n >= 2
        }
    }

    /// Evaluates the gate over its input values. XOR/XNOR are parity gates
    /// for more than two inputs.
    #[inline]
    pub fn eval<I: IntoIterator<Item = bool>>(self, inputs: I) -> bool {
        let mut it = inputs.into_iter();
        match self {
            GateKind::And => it.all(|v| v),
            GateKind::Nand => !it.all(|v| v),
            GateKind::Or => it.any(|v| v),
            GateKind::Nor => !it.any(|v| v),
            GateKind::Not => !it.next().unwrap_or(false),
            GateKind::Buf => it.next().unwrap_or(false),
            GateKind::Xor => it.fold(false, |acc, v| acc ^ v),
            GateKind::Xnor => !it.fold(false, |acc, v| acc ^ v),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

/// A behavioral D flip-flop on the implicit global clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dff {
    pub d: NetId,
    pub q: NetId,
}

/// What drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Input(usize),
    Gate(usize),
    Dff(usize),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: net `{name}` is used but never driven")]
    UndeclaredNet { name: String, line: usize },
    #[error("line {line}: net `{name}` has more than one driver")]
    DuplicateDriver { name: String, line: usize },
    #[error("combinational cycle through nets {}", .nets.join(" -> "))]
    CombinationalCycle { nets: Vec<String> },
    #[error("line {line}: {kind} gate driving `{name}` has {got} inputs")]
    Arity {
        kind: GateKind,
        name: String,
        got: usize,
        line: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Netlist {
    name: String,
    net_names: Vec<String>,
    index: HashMap<String, NetId>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
    dffs: Vec<Dff>,
    drivers: Vec<Driver>,
    schedule: Schedule,
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn dffs(&self) -> &[Dff] {
        &self.dffs
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.net_names[id.index()]
    }

    pub fn net_names(&self) -> &[String] {
        &self.net_names
    }

    pub fn net(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    pub fn driver(&self, id: NetId) -> Driver {
        self.drivers[id.index()]
    }

    /// Gate evaluation order computed at construction.
    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn stats(&self) -> NetlistStats {
        stats(self)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Netlist, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut netlist = parse_bench(&text)?;
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            netlist.name = stem.to_string();
        }
        Ok(netlist)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Name-based equality: same primary I/O (in order), same flip-flops and
    /// the same set of gates, regardless of net numbering or statement order.
    pub fn structurally_eq(&self, other: &Netlist) -> bool {
        self.canonical() == other.canonical()
    }

    fn canonical(&self) -> CanonicalForm<'_> {
        let names = |ids: &[NetId]| ids.iter().map(|&n| self.net_name(n)).collect::<Vec<_>>();
        CanonicalForm {
            inputs: names(&self.inputs),
            outputs: names(&self.outputs),
            dffs: self
                .dffs
                .iter()
                .map(|d| (self.net_name(d.q), self.net_name(d.d)))
                .collect(),
            gates: self
                .gates
                .iter()
                .map(|g| (self.net_name(g.output), g.kind, names(&g.inputs)))
                .collect(),
        }
    }
}

#[derive(PartialEq, Eq)]
struct CanonicalForm<'a> {
    inputs: Vec<&'a str>,
    outputs: Vec<&'a str>,
    dffs: BTreeSet<(&'a str, &'a str)>,
    gates: BTreeSet<(&'a str, GateKind, Vec<&'a str>)>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] NetlistError),
}

/// Census of a netlist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetlistStats {
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub n_dffs: usize,
    pub n_gates_by_kind: BTreeMap<GateKind, usize>,
}

impl NetlistStats {
    pub fn count(&self, kind: GateKind) -> usize {
        self.n_gates_by_kind.get(&kind).copied().unwrap_or(0)
    }

    pub fn total_gates(&self) -> usize {
        self.n_gates_by_kind.values().sum()
    }

    pub fn inverters(&self) -> usize {
        self.count(GateKind::Not)
    }

    /// Every gate that is not an inverter.
    pub fn non_inverter_gates(&self) -> usize {
        self.total_gates() - self.inverters()
    }
}

impl fmt::Display for NetlistStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dffs={} inputs={} outputs={}",
            self.n_dffs, self.n_inputs, self.n_outputs
        )
    }
}

pub fn stats(netlist: &Netlist) -> NetlistStats {
    let mut n_gates_by_kind: BTreeMap<GateKind, usize> =
        GateKind::ALL.iter().map(|&k| (k, 0)).collect();
    for gate in &netlist.gates {
        *n_gates_by_kind.entry(gate.kind).or_default() += 1;
    }
    NetlistStats {
        n_inputs: netlist.inputs.len(),
        n_outputs: netlist.outputs.len(),
        n_dffs: netlist.dffs.len(),
        n_gates_by_kind,
    }
}

/// Incremental constructor used by the parser and the synthetic generators.
///
/// Net ids are handed out in order of first mention. `line` values are only
/// used for diagnostics; pass 0 when there is no source text.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    name: String,
    net_names: Vec<String>,
    index: HashMap<String, NetId>,
    first_use: Vec<usize>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
    dffs: Vec<Dff>,
    drivers: Vec<Option<Driver>>,
    error: Option<NetlistError>,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    fn intern(&mut self, name: &str, line: usize) -> NetId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NetId(self.net_names.len() as u32);
        self.net_names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.first_use.push(line);
        self.drivers.push(None);
        id
    }

    fn drive(&mut self, id: NetId, driver: Driver, line: usize) {
        let slot = &mut self.drivers[id.index()];
        if slot.is_some() {
            if self.error.is_none() {
                self.error = Some(NetlistError::DuplicateDriver {
                    name: self.net_names[id.index()].clone(),
                    line,
                });
            }
        } else {
            *slot = Some(driver);
        }
    }

    pub fn input(&mut self, name: &str, line: usize) -> NetId {
        let id = self.intern(name, line);
        self.drive(id, Driver::Input(self.inputs.len()), line);
        self.inputs.push(id);
        id
    }

    pub fn output(&mut self, name: &str, line: usize) -> NetId {
        let id = self.intern(name, line);
        self.outputs.push(id);
        id
    }

    pub fn gate(&mut self, kind: GateKind, output: &str, inputs: &[&str], line: usize) -> NetId {
        let out = self.intern(output, line);
        let ins: Vec<NetId> = inputs.iter().map(|n| self.intern(n, line)).collect();
        if !kind.arity_ok(ins.len()) && self.error.is_none() {
            self.error = Some(NetlistError::Arity {
                kind,
                name: output.to_string(),
                got: ins.len(),
                line,
            });
        }
        self.drive(out, Driver::Gate(self.gates.len()), line);
        self.gates.push(Gate {
            kind,
            inputs: ins,
            output: out,
        });
        out
    }

    pub fn dff(&mut self, q: &str, d: &str, line: usize) -> NetId {
        let q_id = self.intern(q, line);
        let d_id = self.intern(d, line);
        self.drive(q_id, Driver::Dff(self.dffs.len()), line);
        self.dffs.push(Dff { d: d_id, q: q_id });
        q_id
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        if let Some(err) = self.error {
            return Err(err);
        }
        let mut drivers = Vec::with_capacity(self.drivers.len());
        for (i, d) in self.drivers.iter().enumerate() {
            match d {
                Some(d) => drivers.push(*d),
                None => {
                    return Err(NetlistError::UndeclaredNet {
                        name: self.net_names[i].clone(),
                        line: self.first_use[i],
                    })
                }
            }
        }
        let mut netlist = Netlist {
            name: self.name,
            net_names: self.net_names,
            index: self.index,
            inputs: self.inputs,
            outputs: self.outputs,
            gates: self.gates,
            dffs: self.dffs,
            drivers,
            schedule: Schedule::default(),
        };
        netlist.schedule = levelize(&netlist)?;
        Ok(netlist)
    }
}
