use super::{Driver, Netlist, NetlistError};

/// Gate evaluation order with per-gate logic levels.
///
/// Level 1 gates read only primary inputs and flip-flop outputs; a gate at
/// level `k` reads at least one gate output of level `k - 1`. The order is
/// sorted by `(level, gate index)`, so re-levelizing an already ordered gate
/// list reproduces it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    order: Vec<usize>,
    level: Vec<u32>,
}

impl Schedule {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn level(&self, gate: usize) -> u32 {
        self.level[gate]
    }

    pub fn depth(&self) -> u32 {
        self.level.iter().copied().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn levelize(netlist: &Netlist) -> Result<Schedule, NetlistError> {
    let gates = netlist.gates();
    let n = gates.len();
    let mut pending = vec![0usize; n];
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (g, gate) in gates.iter().enumerate() {
        for &inp in &gate.inputs {
            if let Driver::Gate(src) = netlist.driver(inp) {
                pending[g] += 1;
                readers[src].push(g);
            }
        }
    }

    let mut level = vec![0u32; n];
    let mut ready: Vec<usize> = (0..n).filter(|&g| pending[g] == 0).collect();
    for &g in &ready {
        level[g] = 1;
    }
    let mut done = 0;
    while let Some(g) = ready.pop() {
        done += 1;
        for &r in &readers[g] {
            level[r] = level[r].max(level[g] + 1);
            pending[r] -= 1;
            if pending[r] == 0 {
                ready.push(r);
            }
        }
    }
    if done < n {
        return Err(NetlistError::CombinationalCycle {
            nets: find_cycle(netlist, &pending),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&g| (level[g], g));
    Ok(Schedule { order, level })
}

/// Walks backwards from an unresolved gate until a gate repeats.
fn find_cycle(netlist: &Netlist, pending: &[usize]) -> Vec<String> {
    let gates = netlist.gates();
    let start = pending.iter().position(|&p| p > 0).expect("unresolved gate");
    let mut seen = vec![usize::MAX; gates.len()];
    let mut path = Vec::new();
    let mut g = start;
    while seen[g] == usize::MAX {
        seen[g] = path.len();
        path.push(g);
        g = gates[g]
            .inputs
            .iter()
            .find_map(|&inp| match netlist.driver(inp) {
                Driver::Gate(src) if pending[src] > 0 => Some(src),
                _ => None,
            })
            .expect("unresolved gate has an unresolved driver");
    }
    let mut cycle: Vec<String> = path[seen[g]..]
        .iter()
        .rev()
        .map(|&g| netlist.net_name(gates[g].output).to_string())
        .collect();
    cycle.push(cycle[0].clone());
    cycle
}

#[cfg(test)]
mod tests {
    use crate::netlist::parse_bench;

    #[test]
    fn single_gate() {
        let n = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT(a)\n").unwrap();
        assert_eq!(n.schedule().order(), &[0]);
    }

    #[test]
    fn chain_orders_driver_first() {
        let n = parse_bench("INPUT(x)\nOUTPUT(z)\nz = NOT(y)\ny = NOT(x)\n").unwrap();
        let pos = |name: &str| {
            let g = n
                .gates()
                .iter()
                .position(|g| n.net_name(g.output) == name)
                .unwrap();
            n.schedule().order().iter().position(|&x| x == g).unwrap()
        };
        assert!(pos("y") < pos("z"));
        assert_eq!(n.schedule().depth(), 2);
    }
}
