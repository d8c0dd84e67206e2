//! Cycle-exact model of full-scan verification of a sequential netlist under
//! four execution modes: direct event-driven simulation, simulation
//! acceleration (signal-level link), pass-through transaction emulation
//! (one message per clock) and emulation with a scan FSM transactor (one
//! message per vector).
//!
//! The pipeline is: [`netlist`] parses ISCAS89 `.bench`, [`scan`] inserts a
//! chain, [`sim`] simulates it, [`bridge`] and [`transactor`] model the
//! co-emulation link, [`harness`] runs test plans and golden logs, and
//! [`metrics`] turns run counters into the comparison report. Everything is
//! deterministic; "seconds" are produced by a linear cost model, not
//! measured.
//!
//! ```
//! use scanemu::harness::{run_plan, Mode, RunOptions, TestPlan};
//! use scanemu::scan::{insert_scan, ScanConfig};
//!
//! let scan = insert_scan(scanemu::synth::counter(3), &ScanConfig::default()).unwrap();
//! let direct = run_plan(&scan, &TestPlan::full(Mode::Direct, 3), &RunOptions::default()).unwrap();
//! let fsm = run_plan(&scan, &TestPlan::full(Mode::EmulFsm, 3), &RunOptions::default()).unwrap();
//! assert_eq!(direct.golden, fsm.golden);
//! assert_eq!(direct.scan_cclocks, 35); // 2^3 * (3+1) + 3
//! ```

pub mod bridge;
pub mod cli;
pub mod harness;
pub mod metrics;
pub mod netlist;
pub mod scan;
pub mod sim;
pub mod synth;
pub mod transactor;
