//! Full-scan insertion.
//!
//! Every flip-flop becomes a scan flip-flop whose next state is
//! `CLR ? 0 : (ScanEnable ? scan_in : d)`. Cells are daisy-chained from TDI
//! to TDO in [`ScanConfig::chain_order`]. The base netlist is left untouched;
//! the four control nets (TDI, ScanEnable, CLR, ScanTestMode) are appended
//! after the base nets.

use std::collections::HashSet;
use std::fmt::Write;

use crate::netlist::{NetId, Netlist};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScanError {
    #[error("netlist `{0}` has no flip-flops to chain")]
    NoFlipFlops(String),
    #[error("chain order is not a permutation of 0..{n}: {order:?}")]
    BadChainOrder { n: usize, order: Vec<usize> },
}

/// Chain configuration. Reset is always synchronous and active-high.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanConfig {
    /// `chain_order[k]` is the flip-flop index at chain position `k`
    /// (position 0 is fed by TDI). `None` means declaration order.
    pub chain_order: Option<Vec<usize>>,
}

impl ScanConfig {
    pub fn with_order(order: Vec<usize>) -> Self {
        ScanConfig {
            chain_order: Some(order),
        }
    }
}

/// One scan flip-flop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanCell {
    /// Index into the base netlist's flip-flop list.
    pub dff: usize,
    /// Serial input: TDI for position 0, otherwise the previous cell's q.
    pub scan_in: NetId,
    /// Functional next-state net.
    pub d: NetId,
    pub q: NetId,
}

#[derive(Debug, Clone)]
pub struct ScanNetlist {
    base: Netlist,
    chain: Vec<ScanCell>,
    tdi: NetId,
    tdo: NetId,
    scan_enable: NetId,
    clr: NetId,
    scan_test_mode: NetId,
    control_names: [String; 4],
}

pub fn insert_scan(netlist: Netlist, config: &ScanConfig) -> Result<ScanNetlist, ScanError> {
    let n = netlist.dffs().len();
    if n == 0 {
        return Err(ScanError::NoFlipFlops(netlist.name().to_string()));
    }
    let order = match &config.chain_order {
        None => (0..n).collect::<Vec<_>>(),
        Some(order) => {
            let mut seen = vec![false; n];
            let valid = order.len() == n
                && order
                    .iter()
                    .all(|&i| i < n && !std::mem::replace(&mut seen[i], true));
            if !valid {
                return Err(ScanError::BadChainOrder {
                    n,
                    order: order.clone(),
                });
            }
            order.clone()
        }
    };

    let mut names = NameAllocator::new(&netlist);
    let control_names = [
        names.fresh("TDI"),
        names.fresh("ScanEnable"),
        names.fresh("CLR"),
        names.fresh("ScanTestMode"),
    ];
    let base_nets = netlist.net_count() as u32;
    let tdi = NetId(base_nets);
    let scan_enable = NetId(base_nets + 1);
    let clr = NetId(base_nets + 2);
    let scan_test_mode = NetId(base_nets + 3);

    let mut chain = Vec::with_capacity(n);
    let mut scan_in = tdi;
    for &ff in &order {
        let dff = netlist.dffs()[ff];
        chain.push(ScanCell {
            dff: ff,
            scan_in,
            d: dff.d,
            q: dff.q,
        });
        scan_in = dff.q;
    }
    let tdo = chain[n - 1].q;

    Ok(ScanNetlist {
        base: netlist,
        chain,
        tdi,
        tdo,
        scan_enable,
        clr,
        scan_test_mode,
        control_names,
    })
}

/// Number of scan flip-flops in the chain.
pub fn chain_length(scan: &ScanNetlist) -> usize {
    scan.chain.len()
}

impl ScanNetlist {
    pub fn base(&self) -> &Netlist {
        &self.base
    }

    pub fn chain(&self) -> &[ScanCell] {
        &self.chain
    }

    pub fn chain_length(&self) -> usize {
        self.chain.len()
    }

    pub fn tdi(&self) -> NetId {
        self.tdi
    }

    pub fn tdo(&self) -> NetId {
        self.tdo
    }

    pub fn scan_enable(&self) -> NetId {
        self.scan_enable
    }

    pub fn clr(&self) -> NetId {
        self.clr
    }

    pub fn scan_test_mode(&self) -> NetId {
        self.scan_test_mode
    }

    /// Base nets plus the four scan control nets.
    pub fn net_count(&self) -> usize {
        self.base.net_count() + self.control_names.len()
    }

    pub fn net_name(&self, id: NetId) -> &str {
        let base = self.base.net_count();
        if id.index() < base {
            self.base.net_name(id)
        } else {
            &self.control_names[id.index() - base]
        }
    }

    /// Position of base flip-flop `dff` in the chain.
    pub fn position_of(&self, dff: usize) -> Option<usize> {
        self.chain.iter().position(|c| c.dff == dff)
    }

    /// Signals crossing the DUT boundary when the testbench drives it pin by
    /// pin: primary inputs plus TDI, ScanEnable, CLR and ScanTestMode in;
    /// primary outputs plus TDO out.
    pub fn boundary_io(&self) -> (usize, usize) {
        (
            self.base.inputs().len() + 4,
            self.base.outputs().len() + 1,
        )
    }

    /// Flattened `.bench` rendering of the scanned design. Each scan cell's
    /// mux and clear logic is spelled out in plain gates so the result can be
    /// re-parsed and simulated as an ordinary netlist. Chain positions are
    /// recorded as `# SCANCHAIN k: <ff>` comments.
    pub fn emit_bench(&self) -> String {
        let base = &self.base;
        let mut names = NameAllocator::new(base);
        for c in &self.control_names {
            names.taken.insert(c.clone());
        }
        let [tdi, se, clr, stm] = &self.control_names;
        let se_n = names.fresh("ScanEnable_n");
        let clr_n = names.fresh("CLR_n");
        let tdo = names.fresh("TDO");

        let mut out = String::new();
        let _ = writeln!(out, "# {} (full scan)", base.name());
        let _ = writeln!(
            out,
            "# scan chain: {} cells, {} -> {}",
            self.chain.len(),
            tdi,
            tdo
        );
        out.push('\n');
        for &pi in base.inputs() {
            let _ = writeln!(out, "INPUT({})", base.net_name(pi));
        }
        for c in &self.control_names {
            let _ = writeln!(out, "INPUT({c})");
        }
        out.push('\n');
        for &po in base.outputs() {
            let _ = writeln!(out, "OUTPUT({})", base.net_name(po));
        }
        let _ = writeln!(out, "OUTPUT({tdo})");
        out.push('\n');

        let mut mux_lines = String::new();
        for (k, cell) in self.chain.iter().enumerate() {
            let q = base.net_name(cell.q);
            let d = base.net_name(cell.d);
            let scan_in = self.net_name(cell.scan_in);
            let shift = names.fresh(&format!("{q}_shift"));
            let func = names.fresh(&format!("{q}_func"));
            let mux = names.fresh(&format!("{q}_mux"));
            let next = names.fresh(&format!("{q}_next"));
            let _ = writeln!(out, "# SCANCHAIN {k}: {q}");
            let _ = writeln!(out, "{q} = DFF({next})");
            let _ = writeln!(mux_lines, "{shift} = AND({se}, {scan_in})");
            let _ = writeln!(mux_lines, "{func} = AND({se_n}, {d})");
            let _ = writeln!(mux_lines, "{mux} = OR({shift}, {func})");
            let _ = writeln!(mux_lines, "{next} = AND({clr_n}, {mux})");
        }
        out.push('\n');
        for &g in base.schedule().order() {
            let gate = &base.gates()[g];
            let args: Vec<&str> = gate.inputs.iter().map(|&n| base.net_name(n)).collect();
            let _ = writeln!(
                out,
                "{} = {}({})",
                base.net_name(gate.output),
                gate.kind,
                args.join(", ")
            );
        }
        out.push('\n');
        let _ = writeln!(out, "# scan control ({stm} is an inert mode pin)");
        let _ = writeln!(out, "{se_n} = NOT({se})");
        let _ = writeln!(out, "{clr_n} = NOT({clr})");
        out.push_str(&mux_lines);
        let _ = writeln!(out, "{tdo} = BUFF({})", base.net_name(self.tdo));
        out
    }
}

struct NameAllocator {
    taken: HashSet<String>,
}

impl NameAllocator {
    fn new(netlist: &Netlist) -> Self {
        NameAllocator {
            taken: netlist.net_names().iter().cloned().collect(),
        }
    }

    fn fresh(&mut self, want: &str) -> String {
        let mut name = want.to_string();
        let mut k = 1;
        while self.taken.contains(&name) {
            name = format!("{want}_scan{k}");
            k += 1;
        }
        self.taken.insert(name.clone());
        name
    }
}
