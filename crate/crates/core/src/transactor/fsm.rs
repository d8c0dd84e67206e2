use crate::bridge::{BridgeError, Message, Transactor};
use crate::sim::{Dut, InputFrame, ProcessTag};

/// In-port indices.
pub const VECTOR_PORT: usize = 0;
pub const FLUSH_PORT: usize = 1;

/// Vector message: bits `0..n` scan data (bit 0 shifted first), then CLR,
/// TEST and FM.
pub fn vector_width(n: usize) -> usize {
    n + 3
}

/// Response message: bits `0..n` are the TDO values sampled before each
/// shift edge (bit 0 first out of the chain); bit `n` is TDO sampled before
/// the capture edge, i.e. the bit that has just travelled the whole chain.
pub fn response_width(n: usize) -> usize {
    n + 1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VectorControls {
    pub clr: bool,
    pub test: bool,
    pub fm: bool,
}

pub fn vector_message(n: usize, data: &[bool], controls: VectorControls) -> Result<Message, BridgeError> {
    if data.len() != n {
        return Err(BridgeError::Width {
            port: "fsm vector".into(),
            expected: n,
            got: data.len(),
        });
    }
    let mut m = Message::zeros(vector_width(n))?;
    for (i, &b) in data.iter().enumerate() {
        m.set_bit(i, b);
    }
    m.set_bit(n, controls.clr);
    m.set_bit(n + 1, controls.test);
    m.set_bit(n + 2, controls.fm);
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsmPhase {
    InPortCall,
    VectorReceived,
    Shift(usize),
    Capture,
    SendOut,
    Flush(usize),
}

/// DUT-facing output registers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DutRegisters {
    pub fm: bool,
    pub test: bool,
    pub clr: bool,
    pub scan_data_in: bool,
    pub scan_enable: bool,
    pub scan_test_mode: bool,
}

/// Consumes one whole vector per message and shifts it into the chain
/// itself, collecting the previous vector's response on the way.
///
/// Per vector: `InPortCall → VectorReceived → Shift(0..n) → Capture →
/// SendOut → InPortCall`. Each shift and the capture take exactly one
/// cclock; the handshake states take none. A message on the flush port runs
/// `Flush(0..n)` with zero scan-in and no capture, then `SendOut`.
#[derive(Debug, Clone)]
pub struct FsmState {
    pub current: FsmPhase,
    pub in_vector: Option<Message>,
    pub out_accumulator: Vec<bool>,
    pub vector_index: u64,
    pub registers: DutRegisters,
    n: usize,
    n_inputs: usize,
    stash: Option<Message>,
    out: Option<Message>,
    trace: Option<Vec<FsmPhase>>,
}

impl FsmState {
    pub fn new(n: usize, n_inputs: usize) -> Self {
        FsmState {
            current: FsmPhase::InPortCall,
            in_vector: None,
            out_accumulator: vec![false; response_width(n)],
            vector_index: 0,
            registers: DutRegisters::default(),
            n,
            n_inputs,
            stash: None,
            out: None,
            trace: None,
        }
    }

    pub fn for_dut(dut: &Dut<'_>) -> Self {
        FsmState::new(dut.chain_length(), dut.n_inputs())
    }

    /// Records the phase entered on every uclock edge.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> &[FsmPhase] {
        self.trace.as_deref().unwrap_or(&[])
    }

    fn frame(&self) -> InputFrame {
        let r = &self.registers;
        InputFrame {
            tdi: r.scan_data_in,
            scan_enable: r.scan_enable,
            clr: r.clr,
            test_mode: r.scan_test_mode,
            ..InputFrame::zeros(self.n_inputs)
        }
    }

    fn sample_and_tick(&mut self, slot: usize, dut: &mut Dut<'_>, tag: ProcessTag) -> Result<(), BridgeError> {
        self.out_accumulator[slot] = dut.outputs().tdo;
        dut.tick(&self.frame(), tag)?;
        Ok(())
    }

    fn load(&mut self, msg: Message) {
        self.in_vector = Some(msg);
        self.vector_index += 1;
        self.current = FsmPhase::VectorReceived;
    }

    fn finish(&mut self) -> Result<(), BridgeError> {
        self.registers.scan_enable = false;
        self.registers.scan_data_in = false;
        self.out = Some(Message::from_bits(&self.out_accumulator)?);
        self.current = FsmPhase::SendOut;
        Ok(())
    }
}

impl Transactor for FsmState {
    fn in_widths(&self) -> Vec<usize> {
        vec![vector_width(self.n), 1]
    }

    fn out_widths(&self) -> Vec<usize> {
        vec![response_width(self.n)]
    }

    fn reset(&mut self) {
        self.current = FsmPhase::InPortCall;
        self.in_vector = None;
        self.out_accumulator.fill(false);
        self.registers = DutRegisters::default();
        self.stash = None;
        self.out = None;
    }

    fn in_ready(&self, port: usize) -> bool {
        match (port, self.current) {
            (VECTOR_PORT, FsmPhase::InPortCall) => true,
            // The next vector may arrive while the response is going out.
            (VECTOR_PORT, FsmPhase::SendOut) => self.stash.is_none(),
            (FLUSH_PORT, FsmPhase::InPortCall) => true,
            _ => false,
        }
    }

    fn accept(&mut self, port: usize, msg: Message) -> Result<(), BridgeError> {
        let expected = if port == VECTOR_PORT { vector_width(self.n) } else { 1 };
        if msg.width() != expected {
            return Err(BridgeError::Width {
                port: format!("fsm in{port}"),
                expected,
                got: msg.width(),
            });
        }
        match (port, self.current) {
            (VECTOR_PORT, FsmPhase::InPortCall) => self.load(msg),
            (VECTOR_PORT, FsmPhase::SendOut) if self.stash.is_none() => self.stash = Some(msg),
            (FLUSH_PORT, FsmPhase::InPortCall) => {
                self.registers.scan_enable = true;
                self.registers.scan_data_in = false;
                self.registers.clr = false;
                self.current = FsmPhase::Flush(0);
            }
            (p, phase) => {
                return Err(BridgeError::Protocol(format!(
                    "message on in-port {p} while in {phase:?}"
                )))
            }
        }
        Ok(())
    }

    fn out_offer(&self, _: usize) -> Option<&Message> {
        self.out.as_ref()
    }

    fn out_taken(&mut self, _: usize) {
        self.out = None;
        match self.stash.take() {
            Some(msg) => self.load(msg),
            None => self.current = FsmPhase::InPortCall,
        }
    }

    fn ready_for_cclock(&self) -> bool {
        matches!(
            self.current,
            FsmPhase::Shift(_) | FsmPhase::Capture | FsmPhase::Flush(_)
        )
    }

    fn clock(&mut self, granted: bool, dut: &mut Dut<'_>) -> Result<(), BridgeError> {
        let n = self.n;
        match self.current {
            FsmPhase::InPortCall | FsmPhase::SendOut => {}
            FsmPhase::VectorReceived => {
                let v = self.in_vector.as_ref().expect("vector latched");
                self.registers = DutRegisters {
                    clr: v.bit(n),
                    test: v.bit(n + 1),
                    fm: v.bit(n + 2),
                    scan_data_in: v.bit(0),
                    scan_enable: true,
                    scan_test_mode: true,
                };
                self.current = FsmPhase::Shift(0);
            }
            FsmPhase::Shift(i) if granted => {
                let bit = self.in_vector.as_ref().expect("vector latched").bit(i);
                self.registers.scan_data_in = bit;
                self.sample_and_tick(i, dut, ProcessTag::ScanSeq)?;
                if i + 1 < n {
                    self.current = FsmPhase::Shift(i + 1);
                } else {
                    self.registers.scan_enable = false;
                    self.current = FsmPhase::Capture;
                }
            }
            FsmPhase::Capture if granted => {
                self.registers.scan_enable = false;
                self.sample_and_tick(n, dut, ProcessTag::ScanEnableSeq)?;
                self.finish()?;
            }
            FsmPhase::Flush(i) if granted => {
                self.sample_and_tick(i, dut, ProcessTag::ScanSeq)?;
                if i + 1 < n {
                    self.current = FsmPhase::Flush(i + 1);
                } else {
                    self.out_accumulator[n] = dut.outputs().tdo;
                    self.finish()?;
                }
            }
            FsmPhase::Shift(_) | FsmPhase::Capture | FsmPhase::Flush(_) => {}
        }
        if let Some(t) = &mut self.trace {
            t.push(self.current);
        }
        Ok(())
    }
}
