use serde::{Deserialize, Serialize};

use super::BridgeError;

/// Clock-port parameters. Only the ratio, phase and reset length shape the
/// grant schedule; the duty cycle is carried as a label because the model
/// works on whole edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockParams {
    pub ratio_num: u32,
    pub ratio_den: u32,
    pub duty_hi: u32,
    pub duty_lo: u32,
    pub phase: u32,
    pub reset_cycles: u32,
}

impl Default for ClockParams {
    fn default() -> Self {
        ClockParams {
            ratio_num: 1,
            ratio_den: 1,
            duty_hi: 1,
            duty_lo: 1,
            phase: 0,
            reset_cycles: 8,
        }
    }
}

impl ClockParams {
    pub fn validate(&self) -> Result<(), BridgeError> {
        if self.ratio_num == 0 || self.ratio_den == 0 || self.ratio_num > self.ratio_den {
            return Err(BridgeError::BadClockRatio {
                num: self.ratio_num,
                den: self.ratio_den,
            });
        }
        Ok(())
    }
}

/// What happened on one uclock edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockStep {
    pub uclock: u64,
    pub ureset: bool,
    pub ready_for_cclock: bool,
    pub granted: bool,
}

#[derive(Debug, Clone)]
pub struct ClockControl {
    params: ClockParams,
    uclock_count: u64,
    cclock_count: u64,
    ready_for_cclock: bool,
    reset_cycles_remaining: u32,
}

impl ClockControl {
    pub fn new(params: ClockParams) -> Result<Self, BridgeError> {
        params.validate()?;
        Ok(ClockControl {
            params,
            uclock_count: 0,
            cclock_count: 0,
            ready_for_cclock: false,
            reset_cycles_remaining: params.reset_cycles,
        })
    }

    pub fn params(&self) -> &ClockParams {
        &self.params
    }

    pub fn uclock_count(&self) -> u64 {
        self.uclock_count
    }

    pub fn cclock_count(&self) -> u64 {
        self.cclock_count
    }

    pub fn ready_for_cclock(&self) -> bool {
        self.ready_for_cclock
    }

    pub fn reset_cycles_remaining(&self) -> u32 {
        self.reset_cycles_remaining
    }

    /// Ureset is high on the next edge.
    pub fn in_reset(&self) -> bool {
        self.reset_cycles_remaining > 0
    }

    /// Advances the uncontrolled clock by one edge. A controlled edge is
    /// granted iff the transactor is ready, reset is over and the ratio
    /// schedule has a slot on this edge.
    pub fn clock_step(&mut self, transactor_ready: bool) -> ClockStep {
        let uclock = self.uclock_count;
        self.uclock_count += 1;
        let ureset = self.in_reset();
        self.ready_for_cclock = transactor_ready && !ureset;
        let granted = if ureset {
            self.reset_cycles_remaining -= 1;
            false
        } else {
            let k = uclock - self.params.reset_cycles as u64 + self.params.phase as u64;
            self.ready_for_cclock && self.slot(k)
        };
        if granted {
            self.cclock_count += 1;
        }
        ClockStep {
            uclock,
            ureset,
            ready_for_cclock: self.ready_for_cclock,
            granted,
        }
    }

    fn slot(&self, k: u64) -> bool {
        let (num, den) = (self.params.ratio_num as u64, self.params.ratio_den as u64);
        (k + 1) * num / den > k * num / den
    }
}
