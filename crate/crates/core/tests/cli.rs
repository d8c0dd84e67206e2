mod common;

use std::path::Path;
use std::process::{Command, Output};

use scanemu::metrics::RunStats;

fn scanemu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scanemu"))
        .args(args)
        .env_remove("SCANEMU_SEED")
        .output()
        .unwrap()
}

fn fixture(file: &str) -> String {
    common::data_path(file).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_stats(path: &Path) -> RunStats {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exhaustive_fixture_log_on_stdout() {
    let o = scanemu(&["run", &fixture("counter3.bench"), "--mode", "direct"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("SCANLOG v1 n=3 count=8"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn exit_codes() {
    assert_eq!(scanemu(&["parse", "/definitely/missing.bench"]).status.code(), Some(1));
    assert_eq!(scanemu(&["run", &fixture("counter3.bench")]).status.code(), Some(2));
    assert_eq!(scanemu(&["run", &fixture("counter3.bench"), "--mode", "direct", "--vectors", "9"]).status.code(), Some(2));
    assert_eq!(scanemu(&["bogus"]).status.code(), Some(2));
    assert_eq!(scanemu(&["--version"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bench");
    std::fs::write(&bad, "INPUT(A)\nY = AND(A, Z)\n").unwrap();
    assert_eq!(scanemu(&["parse", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn compare_detects_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.log");
    let b = dir.path().join("b.log");
    let f = fixture("counter3.bench");
    let log = |mode, path: &Path, vectors| {
        let o = scanemu(&["run", &f, "--mode", mode, "--vectors", vectors, "--log", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    log("direct", &a, "full");
    log("emul-fsm", &b, "full");
    assert_eq!(scanemu(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(0));

    // Flip one response bit.
    let text = std::fs::read_to_string(&b).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let flipped: String = lines[3].chars().map(|c| if c == '0' { '1' } else { '0' }).collect();
    lines[3] = flipped;
    std::fs::write(&b, lines.join("\n") + "\n").unwrap();
    let o = scanemu(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    // `run --compare` against the corrupted log fails too.
    let o = scanemu(&["run", &f, "--mode", "acceleration", "--compare", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn all_modes_agree_and_fsm_reads_less() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs");
    let o = scanemu(&[
        "run",
        &fixture("lfsr4.bench"),
        "--all-modes",
        "--out-dir",
        out.to_str().unwrap(),
        "--oracle-check",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let logs: Vec<String> = ["direct", "acceleration", "emul-pass", "emul-fsm"]
        .iter()
        .map(|m| std::fs::read_to_string(out.join(format!("{m}.log"))).unwrap())
        .collect();
    assert!(logs.windows(2).all(|w| w[0] == w[1]));
    let pass = read_stats(&out.join("emul-pass.json"));
    let fsm = read_stats(&out.join("emul-fsm.json"));
    assert!(fsm.hw_reads < pass.hw_reads);

    let report_json = dir.path().join("report.json");
    let stats: Vec<String> = ["direct", "acceleration", "emul-pass", "emul-fsm"]
        .iter()
        .map(|m| out.join(format!("{m}.json")).to_string_lossy().into_owned())
        .collect();
    let mut args = vec!["report"];
    args.extend(stats.iter().map(String::as_str));
    args.extend(["--json", report_json.to_str().unwrap()]);
    let o = scanemu(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("emul-fsm"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report_json).unwrap()).unwrap();
    assert!(v.get("runs").is_some());
}

#[test]
fn report_rejects_mixed_chain_lengths_and_bad_schema() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (file, path) in [("counter3.bench", &a), ("lfsr4.bench", &b)] {
        let o = scanemu(&["run", &fixture(file), "--mode", "direct", "--stats", path.to_str().unwrap(), "--log", "/dev/null"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(scanemu(&["report", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(2));
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, r#"{"mode":"direct","extra":1}"#).unwrap();
    assert_eq!(scanemu(&["report", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("s400.bench");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let stats = dir.path().join(format!("s{i}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_scanemu"))
            .args(["run", &f, "--mode", "emul-pass", "--vectors", "64", "--source", "random", "--stats"])
            .arg(&stats)
            .env("SCANEMU_SEED", "7")
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push((o.stdout, std::fs::read(&stats).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn scan_insert_writes_a_parsable_design() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scanned.bench");
    let o = scanemu(&["scan-insert", &fixture("counter3.bench"), "-o", out.to_str().unwrap(), "--order", "2,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("TDI") && text.contains("ScanEnable"));
    let o = scanemu(&["parse", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(scanemu(&["scan-insert", &fixture("counter3.bench"), "--order", "0,0,1"]).status.code(), Some(2));
}

#[test]
fn waveform_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let vcd = dir.path().join("t.vcd");
    let o = scanemu(&["run", &fixture("toggle1.bench"), "--mode", "direct", "--waveform", vcd.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&vcd).unwrap();
    assert!(text.contains("$enddefinitions"));
    assert!(text.contains("#1"));
}
