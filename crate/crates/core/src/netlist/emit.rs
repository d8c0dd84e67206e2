use std::fmt::Write;

use super::Netlist;

/// Writes `netlist` back out as `.bench` text: inputs, outputs, flip-flops,
/// then gates in schedule order. LF line endings.
pub fn emit_bench(netlist: &Netlist) -> String {
    let mut out = String::new();
    let stats = netlist.stats();
    let _ = writeln!(out, "# {}", netlist.name());
    let _ = writeln!(out, "# {} inputs", stats.n_inputs);
    let _ = writeln!(out, "# {} outputs", stats.n_outputs);
    let _ = writeln!(out, "# {} D-type flipflops", stats.n_dffs);
    let _ = writeln!(out, "# {} inverters", stats.inverters());
    let _ = writeln!(out, "# {} gates", stats.non_inverter_gates());
    out.push('\n');
    for &pi in netlist.inputs() {
        let _ = writeln!(out, "INPUT({})", netlist.net_name(pi));
    }
    out.push('\n');
    for &po in netlist.outputs() {
        let _ = writeln!(out, "OUTPUT({})", netlist.net_name(po));
    }
    out.push('\n');
    for dff in netlist.dffs() {
        let _ = writeln!(
            out,
            "{} = DFF({})",
            netlist.net_name(dff.q),
            netlist.net_name(dff.d)
        );
    }
    out.push('\n');
    for &g in netlist.schedule().order() {
        let gate = &netlist.gates()[g];
        let args: Vec<&str> = gate.inputs.iter().map(|&n| netlist.net_name(n)).collect();
        let _ = writeln!(
            out,
            "{} = {}({})",
            netlist.net_name(gate.output),
            gate.kind,
            args.join(", ")
        );
    }
    out
}
