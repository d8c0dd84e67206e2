//! Hardware-side bus-functional models.
//!
//! [`PassThroughState`] maps each 8-bit message to one DUT cycle; the
//! software does all sequencing. [`FsmState`] takes one whole test vector per
//! message and runs the shift/capture sequence itself, so the bridge carries
//! one message per vector instead of one per cycle.

pub mod fsm;
pub mod passthrough;

pub use fsm::{FsmPhase, FsmState};
pub use passthrough::{PassThroughState, PinCommand};
