use std::io::{self, Write};

use super::SimState;
use crate::scan::ScanNetlist;

/// Minimal VCD writer: one 1-bit wire per net, time = tick index.
pub struct VcdRecorder<W: Write> {
    out: W,
    codes: Vec<String>,
    last: Option<Vec<bool>>,
}

impl<W: Write> VcdRecorder<W> {
    pub fn new(mut out: W, scan: &ScanNetlist) -> io::Result<Self> {
        let n = scan.net_count();
        writeln!(out, "$timescale 10ns $end")?;
        writeln!(out, "$scope module {} $end", scan.base().name())?;
        let codes: Vec<String> = (0..n).map(code).collect();
        for (i, c) in codes.iter().enumerate() {
            let name = scan.net_name(crate::netlist::NetId(i as u32));
            writeln!(out, "$var wire 1 {c} {name} $end")?;
        }
        writeln!(out, "$upscope $end")?;
        writeln!(out, "$enddefinitions $end")?;
        Ok(VcdRecorder {
            out,
            codes,
            last: None,
        })
    }

    /// Dumps every net that changed since the previous call.
    pub fn record(&mut self, time: u64, state: &SimState) -> io::Result<()> {
        writeln!(self.out, "#{time}")?;
        let now = &state.net_values;
        for (i, &v) in now.iter().enumerate() {
            let changed = match &self.last {
                Some(prev) => prev[i] != v,
                None => true,
            };
            if changed {
                writeln!(self.out, "{}{}", if v { '1' } else { '0' }, self.codes[i])?;
            }
        }
        self.last = Some(now.clone());
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

fn code(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'!' + (i % 94) as u8) as char);
        i /= 94;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{insert_scan, ScanConfig};
    use crate::sim::{InputFrame, ProcessTag, SimOptions, Simulator};

    #[test]
    fn codes_are_unique() {
        let codes: std::collections::HashSet<String> = (0..20_000).map(code).collect();
        assert_eq!(codes.len(), 20_000);
    }

    #[test]
    fn dump_has_header_and_changes() {
        let scan = insert_scan(crate::synth::counter(2), &ScanConfig::default()).unwrap();
        let mut sim = Simulator::new(&scan, SimOptions::default());
        let mut st = sim.reset_state();
        let mut vcd = VcdRecorder::new(Vec::new(), &scan).unwrap();
        vcd.record(0, &st).unwrap();
        sim.tick(&mut st, &InputFrame::shift(1, true), ProcessTag::ScanSeq).unwrap();
        vcd.record(1, &st).unwrap();
        let text = String::from_utf8(vcd.into_inner()).unwrap();
        assert!(text.contains("$var wire 1 ! HOLD $end"));
        assert!(text.contains("#1\n"));
        let after = text.split("#1\n").nth(1).unwrap();
        assert!(!after.is_empty());
        assert!(after.lines().count() < scan.net_count());
    }
}
