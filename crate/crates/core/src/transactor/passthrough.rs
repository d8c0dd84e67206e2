use crate::bridge::{BridgeError, Message, Transactor};
use crate::sim::{Dut, InputFrame, ProcessTag};

/// Bit positions of the 8-bit pass-through command.
pub mod layout {
    pub const SCAN_TEST_MODE: usize = 0;
    pub const SCAN_ENABLE: usize = 1;
    pub const SCAN_DATA_IN: usize = 2;
    pub const CLR: usize = 3;
    pub const TEST: usize = 4;
    pub const FM: usize = 5;
    pub const VDD: usize = 6;
    pub const GND: usize = 7;
    pub const WIDTH: usize = 8;
}

/// One DUT cycle worth of control pins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PinCommand {
    pub scan_test_mode: bool,
    pub scan_enable: bool,
    pub scan_data_in: bool,
    pub clr: bool,
    pub test: bool,
    pub fm: bool,
}

impl PinCommand {
    pub fn encode(&self) -> Message {
        let mut m = Message::zeros(layout::WIDTH).expect("non-zero width");
        m.set_bit(layout::SCAN_TEST_MODE, self.scan_test_mode);
        m.set_bit(layout::SCAN_ENABLE, self.scan_enable);
        m.set_bit(layout::SCAN_DATA_IN, self.scan_data_in);
        m.set_bit(layout::CLR, self.clr);
        m.set_bit(layout::TEST, self.test);
        m.set_bit(layout::FM, self.fm);
        m.set_bit(layout::VDD, true);
        m
    }

    pub fn decode(msg: &Message) -> Result<Self, BridgeError> {
        if msg.width() != layout::WIDTH {
            return Err(BridgeError::Width {
                port: "pass-through".into(),
                expected: layout::WIDTH,
                got: msg.width(),
            });
        }
        Ok(PinCommand {
            scan_test_mode: msg.bit(layout::SCAN_TEST_MODE),
            scan_enable: msg.bit(layout::SCAN_ENABLE),
            scan_data_in: msg.bit(layout::SCAN_DATA_IN),
            clr: msg.bit(layout::CLR),
            test: msg.bit(layout::TEST),
            fm: msg.bit(layout::FM),
        })
    }

    /// Scan pins only; the functional inputs are held low during test and
    /// the FM/TEST bits have no DUT pin of their own.
    pub fn to_frame(self, n_inputs: usize) -> InputFrame {
        InputFrame {
            tdi: self.scan_data_in,
            scan_enable: self.scan_enable,
            clr: self.clr,
            test_mode: self.scan_test_mode,
            ..InputFrame::zeros(n_inputs)
        }
    }

    pub fn from_frame(frame: &InputFrame) -> Self {
        PinCommand {
            scan_test_mode: frame.test_mode,
            scan_enable: frame.scan_enable,
            scan_data_in: frame.tdi,
            clr: frame.clr,
            test: false,
            fm: false,
        }
    }
}

/// Process a frame is charged to on the hardware side.
pub fn frame_tag(frame: &InputFrame) -> ProcessTag {
    if frame.clr {
        ProcessTag::ResetSeq
    } else if frame.scan_enable {
        ProcessTag::ScanSeq
    } else {
        ProcessTag::ScanEnableSeq
    }
}

/// Out-message layout: bit 0 is TDO after the cycle, bits `1..` the
/// primary outputs.
pub fn response_width(n_outputs: usize) -> usize {
    1 + n_outputs
}

/// Maps every delivered message to exactly one DUT cycle. With nothing
/// latched, `ready_for_cclock` is low and the DUT is frozen.
#[derive(Debug, Clone)]
pub struct PassThroughState {
    pub latched_frame: Option<InputFrame>,
    pub data_ready_seen: bool,
    n_inputs: usize,
    n_outputs: usize,
    out: Option<Message>,
}

impl PassThroughState {
    pub fn new(n_inputs: usize, n_outputs: usize) -> Self {
        PassThroughState {
            latched_frame: None,
            data_ready_seen: false,
            n_inputs,
            n_outputs,
            out: None,
        }
    }

    pub fn for_dut(dut: &Dut<'_>) -> Self {
        PassThroughState::new(dut.n_inputs(), dut.sim.scan().base().outputs().len())
    }
}

impl Transactor for PassThroughState {
    fn in_widths(&self) -> Vec<usize> {
        vec![layout::WIDTH]
    }

    fn out_widths(&self) -> Vec<usize> {
        vec![response_width(self.n_outputs)]
    }

    fn reset(&mut self) {
        self.latched_frame = None;
        self.data_ready_seen = false;
        self.out = None;
    }

    fn in_ready(&self, _: usize) -> bool {
        self.latched_frame.is_none() && self.out.is_none()
    }

    fn accept(&mut self, _: usize, msg: Message) -> Result<(), BridgeError> {
        let cmd = PinCommand::decode(&msg)?;
        self.latched_frame = Some(cmd.to_frame(self.n_inputs));
        self.data_ready_seen = true;
        Ok(())
    }

    fn out_offer(&self, _: usize) -> Option<&Message> {
        self.out.as_ref()
    }

    fn out_taken(&mut self, _: usize) {
        self.out = None;
    }

    fn ready_for_cclock(&self) -> bool {
        self.latched_frame.is_some()
    }

    fn clock(&mut self, granted: bool, dut: &mut Dut<'_>) -> Result<(), BridgeError> {
        if !granted {
            return Ok(());
        }
        let Some(frame) = self.latched_frame.take() else {
            return Err(BridgeError::Protocol("cclock granted with no frame latched".into()));
        };
        let out = dut.tick(&frame, frame_tag(&frame))?;
        let mut msg = Message::zeros(response_width(self.n_outputs))?;
        msg.set_bit(0, out.tdo);
        for (i, &po) in out.primary_outputs.iter().enumerate() {
            msg.set_bit(1 + i, po);
        }
        self.out = Some(msg);
        self.data_ready_seen = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{Bridge, BridgeConfig};
    use crate::scan::{insert_scan, ScanConfig};
    use crate::sim::SimOptions;

    #[test]
    fn encode_decode_round_trip() {
        let cmd = PinCommand {
            scan_enable: true,
            ..PinCommand::default()
        };
        let m = cmd.encode();
        assert_eq!(m.to_u64(), Some(0b0100_0010));
        assert_eq!(PinCommand::decode(&m).unwrap(), cmd);
    }

    #[test]
    fn wrong_width_is_rejected() {
        let m = Message::zeros(7).unwrap();
        assert!(matches!(PinCommand::decode(&m), Err(BridgeError::Width { expected: 8, got: 7, .. })));
    }

    #[test]
    fn no_delivery_means_no_tick() {
        let scan = insert_scan(crate::synth::counter(3), &ScanConfig::default()).unwrap();
        let dut = Dut::new(&scan, SimOptions::default());
        let xtor = PassThroughState::for_dut(&dut);
        let mut b = Bridge::new(xtor, dut, BridgeConfig::default()).unwrap();
        b.idle(50).unwrap();
        assert_eq!(b.stats().cclocks, 0);
        assert_eq!(b.dut().state.cclock_count, 0);
        assert_eq!(b.recv(0), None);
    }

    #[test]
    fn one_message_one_cycle() {
        let scan = insert_scan(crate::synth::counter(3), &ScanConfig::default()).unwrap();
        let dut = Dut::new(&scan, SimOptions::default());
        let xtor = PassThroughState::for_dut(&dut);
        let mut b = Bridge::new(xtor, dut, BridgeConfig::default()).unwrap();
        let msg = Message::from_u64(8, 0b0100_0010).unwrap();
        let reply = b.transact(0, msg, 0).unwrap();
        assert_eq!(b.dut().state.cclock_count, 1);
        assert!(!reply.bit(0));
        assert_eq!(reply.width(), 3);
        let s = b.stats();
        assert_eq!((s.hw_reads, s.hw_writes, s.cclocks), (1, 1, 1));
    }
}
