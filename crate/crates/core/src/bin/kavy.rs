//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use kavy::aiger::parse_aiger_property;
use kavy::certify::{
    check_invariant, check_k_inductive, check_witness, invariant_text, witness_diagnostic,
};
use kavy::check::{Certificate, CheckResult, EngineOptions, SelStrategy};
use kavy::error::{Error, Result};
use kavy::experiment::{
    parse_range, run_engine, run_experiment, write_experiment_csv, write_family, write_stats_csv,
    EngineKind, ExperimentConfig, Family,
};
use kavy::oracle::DEFAULT_LATCH_BOUND;

#[derive(Parser)]
#[command(
    name = "kavy",
    version,
    about = "Safety model checking for AIGER circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the safety property of an AIGER file.
    Check(CheckArgs),
    /// Write a benchmark family as AIGER files with a manifest.
    Bench(BenchArgs),
    /// Run engines over a family and write one CSV row per instance and engine.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Kavy,
    Vanilla,
    Pdr,
    Kind,
    Bmc,
}

impl From<EngineArg> for EngineKind {
    fn from(e: EngineArg) -> EngineKind {
        match e {
            EngineArg::Kavy => EngineKind::Kavy,
            EngineArg::Vanilla => EngineKind::Vanilla,
            EngineArg::Pdr => EngineKind::Pdr,
            EngineArg::Kind => EngineKind::Kind,
            EngineArg::Bmc => EngineKind::Bmc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelArg {
    Topdown,
    Bottomup,
}

#[derive(Args)]
struct EngineFlags {
    /// SEL search strategy.
    #[arg(long, value_enum, default_value = "topdown")]
    sel: SelArg,
    /// Disable inductive generalization of blocked cubes.
    #[arg(long)]
    no_indgen: bool,
    /// Bound on trace size, or depth for bmc and kind.
    #[arg(long, default_value_t = 64)]
    max_frames: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Conflict limit per SAT query.
    #[arg(long)]
    conflict_budget: Option<u64>,
    /// Wall-clock limit in seconds, checked between iterations.
    #[arg(long)]
    timeout: Option<f64>,
    /// Disable simple-path constraints in kind.
    #[arg(long)]
    no_simple_path: bool,
}

impl EngineFlags {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            max_frames: self.max_frames,
            sel: match self.sel {
                SelArg::Topdown => SelStrategy::TopDown,
                SelArg::Bottomup => SelStrategy::BottomUp,
            },
            gen_enabled: !self.no_indgen,
            simple_path: !self.no_simple_path,
            seed: self.seed,
            conflict_budget: self.conflict_budget,
            ..EngineOptions::default()
        }
    }

    fn timeout(&self) -> Option<Duration> {
        self.timeout.map(Duration::from_secs_f64)
    }
}

#[derive(Args)]
struct CheckArgs {
    /// AIGER file (ASCII or binary).
    path: PathBuf,
    #[arg(long, value_enum, default_value = "kavy")]
    engine: EngineArg,
    /// Property index when the file has several.
    #[arg(long)]
    property: Option<usize>,
    /// Re-check the verdict independently; a safe invariant is written to
    /// PATH (default: the input path with extension .inv).
    #[arg(long, value_name = "PATH", num_args = 0..=1)]
    certify: Option<Option<PathBuf>>,
    /// Print the counterexample stimulus, or write it to PATH.
    #[arg(long, value_name = "PATH", num_args = 0..=1)]
    witness: Option<Option<PathBuf>>,
    /// Write per-iteration statistics as CSV.
    #[arg(long, value_name = "PATH")]
    stats_csv: Option<PathBuf>,
    #[command(flatten)]
    flags: EngineFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// counter, shift, random or random:LATCHES:GATES.
    #[arg(long)]
    family: String,
    /// Parameter range, A..B inclusive (widths, or seeds for random).
    #[arg(long)]
    range: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    range: String,
    /// Comma-separated engine names.
    #[arg(long, default_value = "kavy,vanilla,pdr,kind,bmc")]
    engines: String,
    /// CSV output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip independent certification of verdicts.
    #[arg(long)]
    no_certify: bool,
    #[command(flatten)]
    flags: EngineFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(a) => check(a),
        Command::Bench(a) => bench(a),
        Command::Experiment(a) => experiment(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("kavy: {e}");
            ExitCode::from(1)
        }
    }
}

fn check(a: CheckArgs) -> Result<u8> {
    let bytes =
        fs::read(&a.path).map_err(|e| Error::Usage(format!("{}: {e}", a.path.display())))?;
    let ts = parse_aiger_property(&bytes, a.property)?;
    let engine: EngineKind = a.engine.into();
    let mut opts = a.flags.options();
    opts.deadline = a.flags.timeout().map(|t| Instant::now() + t);
    let run = run_engine(engine, &ts, &opts)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", run.result.code())?;
    if let Some(path) = &a.stats_csv {
        write_stats_csv(fs::File::create(path)?, engine, &run)?;
    }
    if let (CheckResult::Unsafe(w), Some(dest)) = (&run.result, &a.witness) {
        let text = w.to_text();
        match dest {
            Some(path) => fs::write(path, &text)?,
            // the verdict line is already out
            None => out.write_all(
                text.split_once('\n')
                    .map_or("", |(_, rest)| rest)
                    .as_bytes(),
            )?,
        }
    }
    if let Some(dest) = &a.certify {
        certify_run(
            &mut out,
            &run.result,
            &ts,
            &inv_path(&a.path, dest.as_deref()),
        )?;
    }
    out.flush()?;
    Ok(if run.result.code() == 2 { 2 } else { 0 })
}

fn inv_path(input: &Path, dest: Option<&Path>) -> PathBuf {
    match dest {
        Some(p) => p.to_path_buf(),
        None => input.with_extension("inv"),
    }
}

fn certify_run<W: Write>(
    out: &mut W,
    result: &CheckResult,
    ts: &kavy::aiger::TransitionSystem,
    inv_path: &Path,
) -> Result<()> {
    let ok = match result {
        CheckResult::Safe(Certificate::Invariant(inv)) => {
            fs::write(inv_path, invariant_text(inv))?;
            writeln!(
                out,
                "c invariant: {} clauses written to {}",
                inv.len(),
                inv_path.display()
            )?;
            check_invariant(inv, ts)
        }
        CheckResult::Safe(Certificate::KInductive { k, simple_path }) => {
            writeln!(out, "c certificate: property is {k}-inductive")?;
            check_k_inductive(ts, *k, *simple_path)
        }
        CheckResult::Unsafe(w) => {
            let ok = check_witness(w, ts)?;
            if !ok {
                eprintln!("kavy: {}", witness_diagnostic(w, ts));
            }
            ok
        }
        CheckResult::Unknown { .. } => {
            writeln!(out, "c no verdict to certify")?;
            return Ok(());
        }
    };
    if !ok {
        return Err(Error::Contract(
            "the independent certifier rejected the verdict".into(),
        ));
    }
    writeln!(out, "c certified")?;
    Ok(())
}

fn bench(a: BenchArgs) -> Result<u8> {
    let family: Family = a.family.parse()?;
    let instances = family.instances(parse_range(&a.range)?)?;
    write_family(&a.out, &instances, DEFAULT_LATCH_BOUND)?;
    eprintln!("wrote {} instances to {}", instances.len(), a.out.display());
    Ok(0)
}

fn experiment(a: ExperimentArgs) -> Result<u8> {
    let family: Family = a.family.parse()?;
    let engines = a
        .engines
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<EngineKind>>>()?;
    let instances = family.instances(parse_range(&a.range)?)?;
    let cfg = ExperimentConfig {
        engines,
        opts: a.flags.options(),
        timeout: a.flags.timeout(),
        certify: !a.no_certify,
        oracle_bound: DEFAULT_LATCH_BOUND,
    };
    let rows = run_experiment(&instances, &cfg)?;
    match &a.out {
        Some(path) => write_experiment_csv(fs::File::create(path)?, &rows)?,
        None => write_experiment_csv(io::stdout().lock(), &rows)?,
    }
    let disagreements = rows.iter().filter(|r| r.agrees == Some(false)).count();
    let uncertified = rows.iter().filter(|r| r.certified == Some(false)).count();
    if disagreements + uncertified > 0 {
        eprintln!(
            "kavy: {disagreements} oracle disagreements, {uncertified} failed certifications"
        );
    }
    Ok(0)
}
