//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch or I/O failure, 2 usage
//! or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bridge::BridgeConfig;
use crate::harness::{compare_golden, run_plans, GoldenLog, HarnessError, Mode, RunOptions, TestPlan, VectorSource};
use crate::metrics::{render_report, CostModel, RunStats};
use crate::netlist::{LoadError, Netlist};
use crate::scan::{insert_scan, ScanConfig, ScanNetlist};
use crate::sim::{Engine, SimOptions};

/// Environment variable seeding the random vector source.
pub const SEED_ENV: &str = "SCANEMU_SEED";

#[derive(Debug, Parser)]
#[command(name = "scanemu", version, about = "Scan-chain test runs under simulation, acceleration and emulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a .bench netlist and print its census.
    Parse { netlist: PathBuf },
    /// Insert a full scan chain and write the scanned design as .bench.
    ScanInsert {
        netlist: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Chain order as comma-separated flip-flop indices.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Run the scan test plan.
    Run(RunArgs),
    /// Render comparison tables from stats JSON files.
    Report {
        #[arg(required = true)]
        stats: Vec<PathBuf>,
        #[arg(long)]
        cost_model: Option<PathBuf>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare two SCANLOG files bit for bit.
    Compare { left: PathBuf, right: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Counting,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Event,
    Sweep,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub netlist: PathBuf,
    #[arg(long, value_parser = parse_mode, required_unless_present = "all_modes", conflicts_with = "all_modes")]
    pub mode: Option<Mode>,
    /// Run all four modes in parallel; artifacts go to --out-dir.
    #[arg(long, requires = "out_dir")]
    pub all_modes: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// `full` (2^n) or a vector count.
    #[arg(long, default_value = "full", value_parser = parse_vectors)]
    pub vectors: VectorCount,
    #[arg(long, value_enum, default_value_t = SourceArg::Counting)]
    pub source: SourceArg,
    /// Explicit vectors, one integer per line (decimal, 0x or 0b).
    #[arg(long, conflicts_with = "source")]
    pub vector_file: Option<PathBuf>,
    /// Where to write the SCANLOG (stdout if omitted in single-mode runs).
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Where to write the stats JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    /// Cross-check the event-driven kernel against a full sweep every tick.
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Event)]
    pub engine: EngineArg,
    /// Dump a VCD waveform of every DUT tick.
    #[arg(long, conflicts_with = "all_modes")]
    pub waveform: Option<PathBuf>,
    /// Record measured wall time in the stats (makes output non-reproducible).
    #[arg(long)]
    pub wall_clock: bool,
    /// Software turnaround in uclocks between bridge transactions.
    #[arg(long)]
    pub turnaround: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorCount {
    Full,
    Count(u64),
}

fn parse_vectors(s: &str) -> Result<VectorCount, String> {
    if s.eq_ignore_ascii_case("full") {
        return Ok(VectorCount::Full);
    }
    s.parse()
        .map(VectorCount::Count)
        .map_err(|_| format!("expected `full` or a non-negative integer, got `{s}`"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } => CliError::Io(e.to_string()),
            HarnessError::GoldenFormat { .. } | HarnessError::VectorCount { .. } | HarnessError::VectorValue { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Mismatch(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Parse { netlist } => {
            let n = load(&netlist)?;
            let s = n.stats();
            emit(out, &format!("{s}\n"))?;
            let census: Vec<String> = s.n_gates_by_kind.iter().map(|(k, c)| format!("{k}={c}")).collect();
            emit(out, &format!("gates={} {}\n", s.total_gates(), census.join(" ")))?;
            Ok(())
        }
        Command::ScanInsert { netlist, output, order } => {
            let scan = scan_design(&netlist, order)?;
            let text = scan.emit_bench();
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| io_err(&path, e))?,
                None => emit(out, &text)?,
            }
            let (ins, outs) = scan.boundary_io();
            let _ = writeln!(err, "chain length {}, boundary {ins} in / {outs} out", scan.chain_length());
            Ok(())
        }
        Command::Run(args) => cmd_run(args, out, err),
        Command::Report { stats, cost_model, json } => {
            let model = cost_model_from(cost_model.as_deref())?;
            let runs = stats
                .iter()
                .map(|p| {
                    let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
                    serde_json::from_str::<RunStats>(&text)
                        .map_err(|e| CliError::Usage(format!("{}: not a stats file: {e}", p.display())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let report = render_report(&runs, &model).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(out, &report.text)?;
            if let Some(path) = json {
                std::fs::write(&path, report.json_string()).map_err(|e| io_err(&path, e))?;
            }
            Ok(())
        }
        Command::Compare { left, right } => {
            let a = GoldenLog::read(&left)?;
            let b = GoldenLog::read(&right)?;
            let c = compare_golden(&a, &b);
            emit(out, &format!("{c}\n"))?;
            if c.is_equal() {
                Ok(())
            } else {
                Err(CliError::Mismatch(c.to_string()))
            }
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn load(path: &Path) -> Result<Netlist, CliError> {
    Netlist::from_file(path).map_err(|e| match e {
        LoadError::Io { .. } => CliError::Io(e.to_string()),
        LoadError::Parse(p) => CliError::Usage(format!("{}: {p}", path.display())),
    })
}

fn scan_design(path: &Path, order: Option<Vec<usize>>) -> Result<ScanNetlist, CliError> {
    let netlist = load(path)?;
    let config = order.map(ScanConfig::with_order).unwrap_or_default();
    insert_scan(netlist, &config).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cost_model_from(path: Option<&Path>) -> Result<CostModel, CliError> {
    let Some(path) = path else {
        return Ok(CostModel::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let model: CostModel = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a cost model: {e}", path.display())))?;
    model
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(model)
}

fn read_vector_file(path: &Path) -> Result<Vec<u64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let l = l.trim();
            let parsed = if let Some(hex) = l.strip_prefix("0x") {
                u64::from_str_radix(hex, 16)
            } else if let Some(bin) = l.strip_prefix("0b") {
                u64::from_str_radix(bin, 2)
            } else {
                l.parse()
            };
            parsed.map_err(|_| CliError::Usage(format!("{}:{}: bad vector `{l}`", path.display(), i + 1)))
        })
        .collect()
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn cmd_run(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scan = scan_design(&args.netlist, None)?;
    let n = scan.chain_length();

    let mut plan = TestPlan::new(Mode::Direct, 0);
    match &args.vector_file {
        Some(path) => {
            plan = TestPlan::explicit(Mode::Direct, read_vector_file(path)?);
            if let VectorCount::Count(c) = args.vectors {
                plan.vector_count = c;
            }
        }
        None => {
            plan.vector_count = match args.vectors {
                VectorCount::Full if n > 62 => {
                    return Err(CliError::Usage(format!("`full` needs a chain of at most 62 flops, not {n}")))
                }
                VectorCount::Full => 1 << n,
                VectorCount::Count(c) => c,
            };
            if args.source == SourceArg::Random {
                plan.vector_source = VectorSource::Random { seed: seed_from_env()? };
            }
        }
    }
    plan.validate(n)?;

    let mut bridge = BridgeConfig::default();
    if let Some(t) = args.turnaround {
        bridge.turnaround = t;
    }
    let base_opts = RunOptions {
        sim: SimOptions {
            engine: match args.engine {
                EngineArg::Event => Engine::EventDriven,
                EngineArg::Sweep => Engine::FullSweep,
            },
            oracle_check: args.oracle_check,
        },
        bridge,
        cost: cost_model_from(args.cost_model.as_deref())?,
        waveform: args.waveform.clone(),
    };

    let modes: Vec<Mode> = if args.all_modes { Mode::ALL.to_vec() } else { vec![args.mode.expect("clap enforces --mode")] };
    let jobs: Vec<(TestPlan, RunOptions)> = modes.iter().map(|&m| (plan.with_mode(m), base_opts.clone())).collect();
    let results = run_plans(&scan, &jobs);

    let mut outcomes = Vec::new();
    for (mode, result) in modes.iter().zip(results) {
        let mut outcome = result.map_err(|e| match CliError::from(e) {
            CliError::Mismatch(m) => CliError::Mismatch(format!("{mode}: {m}")),
            other => other,
        })?;
        if !args.wall_clock {
            outcome.stats.wall_seconds = 0.0;
        }
        outcomes.push(outcome);
    }

    let stats_json = |s: &RunStats| {
        let mut t = serde_json::to_string_pretty(s).expect("stats serialize");
        t.push('\n');
        t
    };
    let write = |path: &Path, text: &str| std::fs::write(path, text).map_err(|e| io_err(path, e));

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for o in &outcomes {
            let mode = o.stats.mode.name();
            write(&dir.join(format!("{mode}.log")), &o.golden.to_text())?;
            write(&dir.join(format!("{mode}.json")), &stats_json(&o.stats))?;
        }
    }
    if !args.all_modes {
        let o = &outcomes[0];
        match &args.log {
            Some(path) => write(path, &o.golden.to_text())?,
            None if args.out_dir.is_none() => emit(out, &o.golden.to_text())?,
            None => {}
        }
        if let Some(path) = &args.stats {
            write(path, &stats_json(&o.stats))?;
        }
    }

    for o in &outcomes {
        let s = &o.stats;
        let _ = writeln!(
            err,
            "{}: n={} vectors={} cclocks={} (scan sequence {}) uclocks={} hw_reads={} hw_writes={} events={} modeled={:.6}s",
            s.mode, s.n, s.vectors, s.cclocks, o.scan_cclocks, s.uclocks, s.hw_reads, s.hw_writes, s.events, s.estimated_seconds
        );
    }

    // Cross-mode agreement, then the external golden file.
    if let Some((first, rest)) = outcomes.split_first() {
        for o in rest {
            let c = compare_golden(&first.golden, &o.golden);
            if !c.is_equal() {
                return Err(CliError::Mismatch(format!("{} vs {}: {c}", first.stats.mode, o.stats.mode)));
            }
        }
    }
    if let Some(path) = &args.compare {
        let golden = GoldenLog::read(path)?;
        for o in &outcomes {
            let c = compare_golden(&o.golden, &golden);
            let _ = writeln!(err, "{} vs {}: {c}", o.stats.mode, path.display());
            if !c.is_equal() {
                return Err(CliError::Mismatch(format!("{} vs {}: {c}", o.stats.mode, path.display())));
            }
        }
    }
    Ok(())
}
