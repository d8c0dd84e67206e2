mod common;

use common::{RawBench, SMALL_FIXTURES};
use proptest::prelude::*;
use scanemu::harness::{run_plan, run_plans, Comparison, GoldenLog, Mode, RunOptions, TestPlan, VectorSource};
use scanemu::netlist::Netlist;
use scanemu::scan::{insert_scan, ScanConfig, ScanNetlist};
use scanemu::sim::ProcessTag;

fn load(file: &str) -> ScanNetlist {
    insert_scan(Netlist::from_file(common::data_path(file)).unwrap(), &ScanConfig::default()).unwrap()
}

fn run(scan: &ScanNetlist, plan: &TestPlan) -> scanemu::harness::RunOutcome {
    run_plan(scan, plan, &RunOptions::default()).unwrap()
}

#[test]
fn cycle_counts_follow_the_plan_shape() {
    for file in SMALL_FIXTURES {
        let scan = load(file);
        let n = scan.chain_length() as u64;
        let (pis, pos) = (scan.base().inputs().len() as u64, scan.base().outputs().len() as u64);
        for v in [1u64, 2, 1 << n] {
            let plan = TestPlan::new(Mode::Direct, v);
            let scan_cycles = v * (n + 1) + n;
            // Reset, n zero shifts to read the chain, n toggle shifts.
            let preamble = 2 * n + 1;

            let direct = run(&scan, &plan);
            assert_eq!(direct.scan_cclocks, scan_cycles, "{file} v={v}");
            assert_eq!(direct.stats.cclocks, preamble + scan_cycles);
            assert_eq!(direct.stats.hw_reads, 0);

            let accel = run(&scan, &plan.with_mode(Mode::Acceleration));
            assert_eq!(accel.stats.cclocks, direct.stats.cclocks);
            assert_eq!(accel.stats.signal_transfers, accel.stats.cclocks * (pis + 4 + pos + 1));
            assert_eq!(accel.events_by_process.get(ProcessTag::Dut), 0);
            assert_eq!(accel.events_by_process.get(ProcessTag::BridgeSignal), accel.stats.cclocks);
            assert_eq!(
                accel.stats.events,
                direct.stats.events - direct.events_by_process.get(ProcessTag::Dut) + accel.stats.cclocks
            );

            let pass = run(&scan, &plan.with_mode(Mode::EmulPassThrough));
            assert_eq!(pass.stats.cclocks, direct.stats.cclocks);
            assert_eq!(pass.stats.hw_reads, pass.stats.cclocks, "one pin message per cycle");
            assert_eq!(pass.stats.hw_writes, pass.stats.hw_reads);
            assert_eq!(pass.scan_hw_reads, scan_cycles);

            let fsm = run(&scan, &plan.with_mode(Mode::EmulFsm));
            // Reset and toggle messages each take n+1 cycles.
            assert_eq!(fsm.stats.cclocks, 2 * (n + 1) + scan_cycles);
            // One message per vector, a flush, and the two preamble messages.
            assert_eq!(fsm.scan_hw_reads, v + 1);
            assert_eq!(fsm.stats.hw_reads, v + 3);
            assert_eq!(fsm.stats.hw_writes, fsm.stats.hw_reads);
            assert!(fsm.stats.uclocks < pass.stats.uclocks);
        }
    }
}

#[test]
fn attribution_accounts_for_every_event() {
    let scan = load("counter3.bench");
    for mode in Mode::ALL {
        let o = run(&scan, &TestPlan::full(mode, 3));
        assert_eq!(o.events_by_process.total(), o.stats.events, "{mode}");
        let pct: f64 = o.stats.attribution.values().sum();
        assert!((pct - 100.0).abs() < 1e-9, "{mode}: {pct}");
        let tb = o.stats.testbench_fraction();
        assert!((0.0..=1.0).contains(&tb));
        if matches!(mode, Mode::EmulPassThrough | Mode::EmulFsm) {
            assert_eq!(o.events_by_process.get(ProcessTag::Dut), 0, "{mode}");
            assert_eq!(
                o.events_by_process.get(ProcessTag::BridgeMessage),
                2 * o.stats.hw_reads,
                "{mode}: two events per request/response exchange"
            );
        }
    }
}

#[test]
fn preamble_reports_clean_reset_and_single_pulse() {
    for file in SMALL_FIXTURES {
        let scan = load(file);
        let n = scan.chain_length();
        for mode in Mode::ALL {
            let o = run(&scan, &TestPlan::new(mode, 1));
            assert_eq!(o.preamble.reset_scan_out, vec![false; n], "{file} {mode}");
            assert_eq!(o.preamble.toggle_pulses, vec![n], "{file} {mode}");
        }
    }
}

#[test]
fn golden_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counter3.log");
    let scan = load("counter3.bench");
    let mut plan = TestPlan::full(Mode::Direct, 3);
    plan.record_golden = Some(path.clone());
    let recorded = run(&scan, &plan);
    assert_eq!(GoldenLog::read(&path).unwrap(), recorded.golden);

    let mut check = TestPlan::full(Mode::EmulFsm, 3);
    check.compare_golden = Some(path.clone());
    assert_eq!(run(&scan, &check).comparison, Some(Comparison::Equal));

    // A log from a different design must not compare equal.
    let mut other = TestPlan::full(Mode::Direct, 3);
    other.compare_golden = Some(path);
    let lfsr = load("lfsr4.bench");
    other.vector_count = 8;
    assert!(matches!(run(&lfsr, &other).comparison, Some(Comparison::ChainLengthMismatch { .. })));
}

#[test]
fn parallel_runs_match_sequential_runs() {
    let scan = load("lfsr4.bench");
    let jobs: Vec<_> = Mode::ALL.iter().map(|&m| (TestPlan::full(m, 4), RunOptions::default())).collect();
    for ((plan, opts), par) in jobs.iter().zip(run_plans(&scan, &jobs)) {
        let seq = run_plan(&scan, plan, opts).unwrap();
        let par = par.unwrap();
        assert_eq!(seq.golden, par.golden);
        let (mut a, mut b) = (seq.stats, par.stats);
        a.wall_seconds = 0.0;
        b.wall_seconds = 0.0;
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_and_explicit_vectors_match_the_oracle(
        seed in any::<u64>(),
        count in 1u64..12,
        fixture in 0usize..SMALL_FIXTURES.len(),
        mode_ix in 0usize..4,
    ) {
        let file = SMALL_FIXTURES[fixture];
        let scan = load(file);
        let raw = RawBench::load(file);
        let n = scan.chain_length();
        let mut plan = TestPlan::new(Mode::ALL[mode_ix], count);
        plan.vector_source = VectorSource::Random { seed };
        let values: Vec<u64> = plan.vectors(n).collect();
        let a = run(&scan, &plan);
        let b = run(&scan, &plan);
        prop_assert_eq!(&a.golden, &b.golden, "same seed, same log");
        for (v, got) in values.iter().zip(a.golden.responses()) {
            prop_assert_eq!(got, &raw.capture_response(*v));
        }
        let explicit = run(&scan, &TestPlan::explicit(Mode::Direct, values));
        prop_assert_eq!(&explicit.golden, &a.golden);
    }
}
