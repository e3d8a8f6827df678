//! Bounded model checking and k-induction.

use std::time::Instant;

use crate::aiger::TransitionSystem;
use crate::check::{
    is_sat, Certificate, CheckResult, EngineOptions, EngineRun, IterationStats, Stats, Witness,
};
use crate::cnf::{ClauseSink, Enc, Unroller};
use crate::error::{Error, Result};
use crate::sat::{self, Lit, Solver};

fn finish(
    result: Result<CheckResult>,
    mut stats: Stats,
    start: Instant,
    q0: u64,
    c0: u64,
) -> Result<EngineRun> {
    stats.sat_queries = sat::solve_calls() - q0;
    stats.conflicts = sat::total_conflicts() - c0;
    stats.elapsed = start.elapsed();
    let result = match result {
        Ok(r) => r,
        Err(Error::Budget) => CheckResult::Unknown {
            bound: stats.frames,
        },
        Err(e) => return Err(e),
    };
    Ok(EngineRun { result, stats })
}

/// Runs `body` with query, conflict and time accounting.
pub(crate) fn instrumented<F>(body: F) -> Result<EngineRun>
where
    F: FnOnce(&mut Stats, Instant, u64) -> Result<CheckResult>,
{
    let start = Instant::now();
    let q0 = sat::solve_calls();
    let c0 = sat::total_conflicts();
    let mut stats = Stats::default();
    let result = body(&mut stats, start, q0);
    finish(result, stats, start, q0, c0)
}

/// Satisfiable under `bad` as an assumption; constant encodings short-cut.
fn sat_with(s: &mut Solver, bad: Enc) -> Result<bool> {
    match bad {
        Enc::Const(false) => Ok(false),
        Enc::Const(true) => is_sat(s, &[]),
        Enc::Lit(l) => is_sat(s, &[l]),
    }
}

/// `Init(v_0) & Tr^n & Bad(v_n)` for `n = 0, 1, ..` on one incremental
/// solver. Reports the least failing depth.
pub fn bmc(ts: &TransitionSystem, max_depth: usize, opts: &EngineOptions) -> Result<EngineRun> {
    instrumented(|stats, start, q0| {
        let mut s = opts.solver();
        let mut u = Unroller::new(ts);
        u.add_init(&mut s, 0, 0);
        for n in 0..=max_depth {
            opts.check_deadline()?;
            stats.frames = n;
            let bad = u.encode_bad(&mut s, n, 0);
            if sat_with(&mut s, bad)? {
                let inputs = (0..=n).map(|t| u.read_inputs(&s, t)).collect();
                return Ok(CheckResult::Unsafe(Witness { inputs }));
            }
            u.add_transition(&mut s, n, 0);
            stats.iterations.push(IterationStats {
                frames: n,
                sel: None,
                sat_queries: sat::solve_calls() - q0,
                learned_clauses: 0,
                elapsed: start.elapsed(),
            });
        }
        Ok(CheckResult::Unknown { bound: max_depth })
    })
}

/// Asserts that the latch vectors of frames `a` and `b` differ.
pub(crate) fn add_distinct<S: ClauseSink>(u: &mut Unroller, sink: &mut S, a: usize, b: usize) {
    let mut some = Vec::with_capacity(u.ts().num_latches());
    for l in 0..u.ts().num_latches() {
        let x = Lit::pos(u.latch_var(sink, l, a));
        let y = Lit::pos(u.latch_var(sink, l, b));
        let d = Lit::pos(sink.new_var());
        sink.add_clause_in(&[!d, x, y], 0);
        sink.add_clause_in(&[!d, !x, !y], 0);
        some.push(d);
    }
    sink.add_clause_in(&some, 0);
}

/// k-induction for `k = 1 ..= max_k`: the base case is a bmc query at depth
/// `k - 1`; the step case asks for `k + 1` states, `!Bad` in the first `k`,
/// `Bad` in the last, pairwise distinct when `simple_path` is set.
pub fn kind(ts: &TransitionSystem, max_k: usize, opts: &EngineOptions) -> Result<EngineRun> {
    let simple_path = opts.simple_path;
    instrumented(|stats, start, q0| {
        let mut base = opts.solver();
        let mut bu = Unroller::new(ts);
        bu.add_init(&mut base, 0, 0);
        let mut step = opts.solver();
        let mut su = Unroller::new(ts);
        for l in 0..ts.num_latches() {
            su.latch_var(&mut step, l, 0);
        }
        for k in 1..=max_k {
            opts.check_deadline()?;
            stats.frames = k;
            // base: no counterexample of length k - 1
            let d = k - 1;
            let bad = bu.encode_bad(&mut base, d, 0);
            if sat_with(&mut base, bad)? {
                let inputs = (0..=d).map(|t| bu.read_inputs(&base, t)).collect();
                return Ok(CheckResult::Unsafe(Witness { inputs }));
            }
            bu.add_transition(&mut base, d, 0);
            // step: frames 0..=k, property at 0..k-1
            let prev = su.encode_bad(&mut step, d, 0);
            crate::cnf::assert_enc(&mut step, !prev, 0);
            su.add_transition(&mut step, d, 0);
            if simple_path {
                for j in 0..k {
                    add_distinct(&mut su, &mut step, j, k);
                }
            }
            let bad = su.encode_bad(&mut step, k, 0);
            let cti = sat_with(&mut step, bad)?;
            stats.iterations.push(IterationStats {
                frames: k,
                sel: None,
                sat_queries: sat::solve_calls() - q0,
                learned_clauses: 0,
                elapsed: start.elapsed(),
            });
            if !cti {
                stats.k = Some(k);
                return Ok(CheckResult::Safe(Certificate::KInductive {
                    k,
                    simple_path,
                }));
            }
        }
        Ok(CheckResult::Unknown { bound: max_k })
    })
}
