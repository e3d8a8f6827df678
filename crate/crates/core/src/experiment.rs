//! Engine selection, benchmark families and the CSV experiment runner.

use std::fmt;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::aiger::TransitionSystem;
use crate::certify;
use crate::check::{CheckResult, EngineOptions, EngineRun};
use crate::engines::{bmc, kind};
use crate::error::{Error, Result};
use crate::family::{gen_counter, gen_random_aig, gen_shift};
use crate::kavy::{kavy_engine, vanilla_engine};
use crate::oracle::{bfs_reachable_bounded, DEFAULT_LATCH_BOUND};
use crate::par::par_map;
use crate::pdr::pdr_engine;

/// Schema tag written as the first line of the experiment CSV.
pub const EXPERIMENT_SCHEMA: &str = "# kavy experiment csv v1";
/// Schema tag written as the first line of a per-iteration stats CSV.
pub const STATS_SCHEMA: &str = "# kavy stats csv v1";
/// Schema tag written as the first line of a benchmark manifest.
pub const MANIFEST_SCHEMA: &str = "# kavy manifest csv v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Kavy,
    Vanilla,
    Pdr,
    Kind,
    Bmc,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] = [
        EngineKind::Kavy,
        EngineKind::Vanilla,
        EngineKind::Pdr,
        EngineKind::Kind,
        EngineKind::Bmc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Kavy => "kavy",
            EngineKind::Vanilla => "vanilla",
            EngineKind::Pdr => "pdr",
            EngineKind::Kind => "kind",
            EngineKind::Bmc => "bmc",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<EngineKind> {
        EngineKind::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown engine '{s}' (kavy, vanilla, pdr, kind, bmc)"
                ))
            })
    }
}

/// Runs one engine. `max_frames` bounds the depth of bmc and kind too.
pub fn run_engine(
    engine: EngineKind,
    ts: &TransitionSystem,
    opts: &EngineOptions,
) -> Result<EngineRun> {
    match engine {
        EngineKind::Kavy => kavy_engine(ts, opts),
        EngineKind::Vanilla => vanilla_engine(ts, opts),
        EngineKind::Pdr => pdr_engine(ts, opts),
        EngineKind::Kind => kind(ts, opts.max_frames, opts),
        EngineKind::Bmc => bmc(ts, opts.max_frames, opts),
    }
}

/// A parameterized benchmark family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Parameter `w`: a `w`-bit counter resetting at `2^(w-1)`, bad from
    /// `2^(w-1) + 2`. `w = 8` is the classic 2-inductive example.
    Counter,
    /// Parameter: bit-width.
    Shift,
    /// Parameter: seed.
    Random { latches: usize, gates: usize },
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Counter => "counter",
            Family::Shift => "shift",
            Family::Random { .. } => "random",
        }
    }

    pub fn instance(self, p: u64) -> Result<Instance> {
        let ts = match self {
            Family::Counter => {
                if !(3..=63).contains(&p) {
                    return Err(Error::Usage(format!(
                        "counter width must be in 3..=63, got {p}"
                    )));
                }
                let reset = 1u64 << (p - 1);
                gen_counter(p as usize, reset, reset + 2)?
            }
            Family::Shift => gen_shift(p as usize)?,
            Family::Random { latches, gates } => gen_random_aig(p, latches, gates),
        };
        Ok(Instance {
            name: format!("{}_{p}", self.name()),
            ts,
        })
    }

    pub fn instances(self, range: RangeInclusive<u64>) -> Result<Vec<Instance>> {
        range.map(|p| self.instance(p)).collect()
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `counter`, `shift`, `random` or `random:LATCHES:GATES`.
    fn from_str(s: &str) -> Result<Family> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad number '{t}' in family '{s}'")))
        };
        match parts.as_slice() {
            ["counter"] => Ok(Family::Counter),
            ["shift"] => Ok(Family::Shift),
            ["random"] => Ok(Family::Random {
                latches: 8,
                gates: 40,
            }),
            ["random", l, g] => Ok(Family::Random {
                latches: num(l)?,
                gates: num(g)?,
            }),
            _ => Err(Error::Usage(format!(
                "unknown family '{s}' (counter, shift, random, random:LATCHES:GATES)"
            ))),
        }
    }
}

/// Parses `A..B`, `A..=B` (both inclusive) or a single number.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>> {
    let bad = || Error::Usage(format!("bad range '{s}', expected A..B or N"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    let r = match s.split_once("..") {
        None => {
            let n = num(s)?;
            n..=n
        }
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
    };
    if r.is_empty() {
        return Err(bad());
    }
    Ok(r)
}

pub struct Instance {
    pub name: String,
    pub ts: TransitionSystem,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub engines: Vec<EngineKind>,
    pub opts: EngineOptions,
    /// Wall-clock limit per (instance, engine) row.
    pub timeout: Option<Duration>,
    /// Re-check every verdict with the independent certifier.
    pub certify: bool,
    /// Largest latch count for which the oracle runs.
    pub oracle_bound: usize,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            engines: EngineKind::ALL.to_vec(),
            opts: EngineOptions::default(),
            timeout: None,
            certify: true,
            oracle_bound: DEFAULT_LATCH_BOUND,
        }
    }
}

/// Verdict column of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    Unsafe,
    Unknown,
    Timeout,
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Safe => "safe",
            Verdict::Unsafe => "unsafe",
            Verdict::Unknown => "unknown",
            Verdict::Timeout => "timeout",
            Verdict::Error => "error",
        }
    }
}

/// Ground truth from the explicit-state oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Safe,
    /// Unsafe with the shortest counterexample length.
    Unsafe(usize),
    /// The instance exceeds the oracle bound.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub instance: String,
    pub engine: EngineKind,
    pub verdict: Verdict,
    pub frames: usize,
    /// Converging k for kind, largest SEL depth for kavy and vanilla,
    /// counterexample depth for an unsafe verdict.
    pub depth: Option<usize>,
    pub sat_queries: u64,
    pub conflicts: u64,
    pub time: Duration,
    pub oracle: OracleVerdict,
    /// `None` when there is nothing to compare.
    pub agrees: Option<bool>,
    pub certified: Option<bool>,
    pub note: String,
}

impl Row {
    fn from_run(instance: &str, engine: EngineKind, run: &EngineRun, timed_out: bool) -> Row {
        let (verdict, depth) = match &run.result {
            CheckResult::Safe(_) => (Verdict::Safe, run.stats.k.or(run.stats.max_sel_k)),
            CheckResult::Unsafe(w) => (Verdict::Unsafe, Some(w.depth())),
            CheckResult::Unknown { .. } if timed_out => (Verdict::Timeout, None),
            CheckResult::Unknown { .. } => (Verdict::Unknown, None),
        };
        Row {
            instance: instance.to_string(),
            engine,
            verdict,
            frames: run.stats.frames,
            depth,
            sat_queries: run.stats.sat_queries,
            conflicts: run.stats.conflicts,
            time: run.stats.elapsed,
            oracle: OracleVerdict::Skipped,
            agrees: None,
            certified: None,
            note: String::new(),
        }
    }
}

/// Whether a verdict is consistent with the oracle. Unknown and timeout
/// contradict nothing.
pub fn agrees_with_oracle(verdict: Verdict, oracle: OracleVerdict) -> Option<bool> {
    match (verdict, oracle) {
        (_, OracleVerdict::Skipped) => None,
        (Verdict::Safe, o) => Some(o == OracleVerdict::Safe),
        (Verdict::Unsafe, o) => Some(o != OracleVerdict::Safe),
        (Verdict::Error, _) => Some(false),
        (Verdict::Unknown | Verdict::Timeout, _) => None,
    }
}

fn oracle_verdict(ts: &TransitionSystem, bound: usize) -> OracleVerdict {
    if ts.num_latches() > bound {
        return OracleVerdict::Skipped;
    }
    match bfs_reachable_bounded(ts, bound) {
        Ok(r) => match r.shortest_cex {
            None => OracleVerdict::Safe,
            Some(n) => OracleVerdict::Unsafe(n),
        },
        Err(_) => OracleVerdict::Skipped,
    }
}

/// One row per (instance, engine), in instance-major order. Instances are
/// processed by parallel workers, each owning its engines and solvers.
pub fn run_experiment(instances: &[Instance], cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    if cfg.engines.is_empty() {
        return Err(Error::Usage("the engine list is empty".into()));
    }
    let oracles = par_map(instances, |inst| oracle_verdict(&inst.ts, cfg.oracle_bound));
    let jobs: Vec<(usize, EngineKind)> = (0..instances.len())
        .flat_map(|i| cfg.engines.iter().map(move |&e| (i, e)))
        .collect();
    let rows = par_map(&jobs, |&(i, engine)| {
        let inst = &instances[i];
        let mut opts = cfg.opts.clone();
        let start = Instant::now();
        if let Some(t) = cfg.timeout {
            opts.deadline = Some(start + t);
        }
        let mut row = match run_engine(engine, &inst.ts, &opts) {
            Ok(run) => {
                let timed_out = cfg.timeout.is_some_and(|t| start.elapsed() >= t);
                let mut row = Row::from_run(&inst.name, engine, &run, timed_out);
                if cfg.certify {
                    match certify::check_result(&run.result, &inst.ts) {
                        Ok(ok) => row.certified = Some(ok),
                        Err(e) => {
                            row.certified = Some(false);
                            row.note = e.to_string();
                        }
                    }
                }
                row
            }
            Err(e) => Row {
                instance: inst.name.clone(),
                engine,
                verdict: Verdict::Error,
                frames: 0,
                depth: None,
                sat_queries: 0,
                conflicts: 0,
                time: start.elapsed(),
                oracle: OracleVerdict::Skipped,
                agrees: None,
                certified: None,
                note: e.to_string(),
            },
        };
        row.oracle = oracles[i];
        row.agrees = agrees_with_oracle(row.verdict, row.oracle);
        row
    });
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn yes_no(v: Option<bool>) -> &'static str {
    match v {
        None => "",
        Some(true) => "yes",
        Some(false) => "no",
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Usage(format!("csv: {other:?}")),
    }
}

/// Writes the rows with a schema comment line. Only the `time_ms` column
/// varies between reruns with the same flags.
pub fn write_experiment_csv<W: Write>(mut out: W, rows: &[Row]) -> Result<()> {
    writeln!(out, "{EXPERIMENT_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "instance",
        "engine",
        "verdict",
        "frames",
        "depth",
        "sat_queries",
        "conflicts",
        "time_ms",
        "oracle",
        "oracle_cex",
        "agrees",
        "certified",
        "note",
    ])
    .map_err(csv_error)?;
    for r in rows {
        let (oracle, cex) = match r.oracle {
            OracleVerdict::Safe => ("safe", None),
            OracleVerdict::Unsafe(n) => ("unsafe", Some(n)),
            OracleVerdict::Skipped => ("", None),
        };
        w.write_record([
            r.instance.clone(),
            r.engine.name().to_string(),
            r.verdict.name().to_string(),
            r.frames.to_string(),
            opt(r.depth),
            r.sat_queries.to_string(),
            r.conflicts.to_string(),
            format!("{:.3}", r.time.as_secs_f64() * 1e3),
            oracle.to_string(),
            opt(cex),
            yes_no(r.agrees).to_string(),
            yes_no(r.certified).to_string(),
            r.note.clone(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-iteration statistics of one run. kind rows carry the induction
/// depth of the iteration in the `k` column.
pub fn write_stats_csv<W: Write>(mut out: W, engine: EngineKind, run: &EngineRun) -> Result<()> {
    writeln!(out, "{STATS_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "iteration",
        "frames",
        "sel_i",
        "sel_k",
        "k",
        "sat_queries",
        "learned_clauses",
        "time_ms",
    ])
    .map_err(csv_error)?;
    for (n, it) in run.stats.iterations.iter().enumerate() {
        let k = if engine == EngineKind::Kind {
            Some(it.frames)
        } else {
            None
        };
        w.write_record([
            n.to_string(),
            it.frames.to_string(),
            opt(it.sel.map(|s| s.i)),
            opt(it.sel.map(|s| s.k)),
            opt(k),
            it.sat_queries.to_string(),
            it.learned_clauses.to_string(),
            format!("{:.3}", it.elapsed.as_secs_f64() * 1e3),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes each instance as `NAME.aag` into `dir` together with
/// `manifest.csv` listing sizes and the oracle verdict when in bounds.
pub fn write_family(dir: &Path, instances: &[Instance], oracle_bound: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    let oracles = par_map(instances, |inst| oracle_verdict(&inst.ts, oracle_bound));
    let mut manifest = fs::File::create(dir.join("manifest.csv"))?;
    writeln!(manifest, "{MANIFEST_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(manifest);
    w.write_record([
        "name",
        "file",
        "inputs",
        "latches",
        "ands",
        "oracle",
        "oracle_cex",
    ])
    .map_err(csv_error)?;
    for (inst, oracle) in instances.iter().zip(oracles) {
        let file = format!("{}.aag", inst.name);
        fs::write(dir.join(&file), inst.ts.to_aag())?;
        let (verdict, cex) = match oracle {
            OracleVerdict::Safe => ("safe", None),
            OracleVerdict::Unsafe(n) => ("unsafe", Some(n)),
            OracleVerdict::Skipped => ("", None),
        };
        w.write_record([
            inst.name.clone(),
            file,
            inst.ts.num_inputs().to_string(),
            inst.ts.num_latches().to_string(),
            inst.ts.num_ands().to_string(),
            verdict.to_string(),
            opt(cex),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
