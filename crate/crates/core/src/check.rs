//! Verdicts, certificates, witnesses and engine options shared by all
//! engines.

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::sat::{Lit, SolveResult, Solver};
use crate::state::Clause;
use crate::trace::Sel;

/// Input stimulus: one input vector per frame, frame 0 first. The last
/// frame's inputs are the ones under which `Bad` evaluates to true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub inputs: Vec<Vec<bool>>,
}

impl Witness {
    /// Number of transitions taken, i.e. frames minus one.
    pub fn depth(&self) -> usize {
        self.inputs.len().saturating_sub(1)
    }

    /// HWMCC-style text: `1`, then one line of input bits per frame.
    pub fn to_text(&self) -> String {
        let mut out = String::from("1\n");
        for frame in &self.inputs {
            out.extend(frame.iter().map(|&b| if b { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    /// Parses the text produced by [`Witness::to_text`].
    pub fn from_text(text: &str) -> Result<Witness> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("1") {
            return Err(Error::Usage("witness must start with a line \"1\"".into()));
        }
        let mut inputs = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line.trim();
            if line == "." {
                break;
            }
            let frame = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Usage(format!(
                        "witness line {}: unexpected {c:?}",
                        n + 2
                    ))),
                })
                .collect::<Result<Vec<bool>>>()?;
            inputs.push(frame);
        }
        Ok(Witness { inputs })
    }
}

/// Evidence for a SAFE verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// An inductive invariant in CNF over latch literals.
    Invariant(Vec<Clause>),
    /// `!Bad` is k-inductive (k-induction cannot produce a 1-inductive
    /// formula over latches, so the certifier re-runs both k-induction
    /// checks).
    KInductive { k: usize, simple_path: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Safe(Certificate),
    Unsafe(Witness),
    /// No verdict within the given bound or budget.
    Unknown {
        bound: usize,
    },
}

impl CheckResult {
    /// The HWMCC answer code: 0 safe, 1 unsafe, 2 unknown.
    pub fn code(&self) -> u8 {
        match self {
            CheckResult::Safe(_) => 0,
            CheckResult::Unsafe(_) => 1,
            CheckResult::Unknown { .. } => 2,
        }
    }

    pub fn is_safe(&self) -> bool {
        matches!(self, CheckResult::Safe(_))
    }

    pub fn is_unsafe(&self) -> bool {
        matches!(self, CheckResult::Unsafe(_))
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckResult::Safe(_) => write!(f, "safe"),
            CheckResult::Unsafe(w) => write!(f, "unsafe at depth {}", w.depth()),
            CheckResult::Unknown { bound } => write!(f, "unknown at bound {bound}"),
        }
    }
}

/// One outer iteration of an engine.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationStats {
    pub frames: usize,
    pub sel: Option<Sel>,
    pub sat_queries: u64,
    pub learned_clauses: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    /// Trace size (or depth, for bmc and kind) at termination.
    pub frames: usize,
    /// Induction depth at which kind converged.
    pub k: Option<usize>,
    /// Largest SEL depth used by kavy.
    pub max_sel_k: Option<usize>,
    pub sat_queries: u64,
    pub conflicts: u64,
    pub iterations: Vec<IterationStats>,
    pub elapsed: Duration,
    /// SEL found by the first search of a kavy run.
    pub first_sel: Option<Sel>,
    /// Number of sequence interpolants extracted and validated.
    pub interpolants: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelStrategy {
    #[default]
    TopDown,
    BottomUp,
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub max_frames: usize,
    pub sel: SelStrategy,
    /// Abort the bottom-up search after this many queries and keep the best
    /// SEL found so far.
    pub sel_query_budget: Option<u64>,
    pub gen_enabled: bool,
    pub simple_path: bool,
    pub seed: u64,
    /// Conflicts per SAT query.
    pub conflict_budget: Option<u64>,
    pub deadline: Option<Instant>,
    /// Check every interpolant against the interpolation conditions.
    pub validate_itp: bool,
    /// Check the trace invariants at every iteration (expensive).
    pub debug_checks: bool,
}

impl Default for EngineOptions {
    fn default() -> EngineOptions {
        EngineOptions {
            max_frames: 64,
            sel: SelStrategy::TopDown,
            sel_query_budget: None,
            gen_enabled: true,
            simple_path: true,
            seed: 0,
            conflict_budget: None,
            deadline: None,
            validate_itp: cfg!(debug_assertions),
            debug_checks: false,
        }
    }
}

impl EngineOptions {
    /// A solver configured with this run's seed and budget.
    pub fn solver(&self) -> Solver {
        let mut s = Solver::new();
        s.set_seed(self.seed);
        s.set_conflict_budget(self.conflict_budget);
        s
    }

    pub fn proof_solver(&self) -> Solver {
        let mut s = Solver::with_proof();
        s.set_seed(self.seed);
        s.set_conflict_budget(self.conflict_budget);
        s
    }

    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Budget),
            _ => Ok(()),
        }
    }
}

/// Satisfiability under assumptions, mapping an exhausted budget to
/// [`Error::Budget`].
pub fn is_sat(s: &mut Solver, assumptions: &[Lit]) -> Result<bool> {
    match s.solve(assumptions) {
        SolveResult::Sat => Ok(true),
        SolveResult::Unsat => Ok(false),
        SolveResult::Unknown => Err(Error::Budget),
    }
}

/// An engine verdict together with its statistics.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub result: CheckResult,
    pub stats: Stats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_text_round_trip() {
        let w = Witness {
            inputs: vec![vec![true, false], vec![false, false], vec![true, true]],
        };
        assert_eq!(w.depth(), 2);
        let text = w.to_text();
        assert_eq!(text, "1\n10\n00\n11\n");
        assert_eq!(Witness::from_text(&text).unwrap(), w);
    }

    #[test]
    fn witness_without_inputs_has_empty_lines() {
        let w = Witness {
            inputs: vec![vec![]; 4],
        };
        assert_eq!(w.to_text().lines().count(), 5);
        assert_eq!(Witness::from_text(&w.to_text()).unwrap().depth(), 3);
    }

    #[test]
    fn witness_rejects_bad_header() {
        assert!(Witness::from_text("0\n1\n").is_err());
    }
}
