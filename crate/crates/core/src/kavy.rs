//! The k-induction guided trace extension loop: maximal strong extension
//! level search (top-down and bottom-up), extension of a trace from a
//! sequence interpolant by recursive blocking, and the main loop together
//! with its 1-inductive "vanilla" restriction.

use crate::aiger::TransitionSystem;
use crate::check::{
    is_sat, Certificate, CheckResult, EngineOptions, EngineRun, IterationStats, SelStrategy,
    Witness,
};
use crate::cnf::{assert_enc, Unroller};
use crate::engines::instrumented;
use crate::error::{Error, Result};
use crate::formula::{Edge, Formula};
use crate::itp::{
    check_heart_shape, refute_and_interpolate, validate_seq_interpolant, ItpPartition,
    SeqInterpolant,
};
use crate::pdr::{initial_violation, pdr_block, BlockOutcome, Target, Window};
use crate::sat::{self, SolveResult, Solver};
use crate::trace::{check_sel, encode_characteristic, InductiveTrace, Sel};

/// Result of a SEL search with its query counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelSearch {
    pub sel: Sel,
    /// Queries spent choosing the level (the suffix).
    pub suffix_queries: u64,
    /// Queries spent choosing the depth.
    pub depth_queries: u64,
    /// The level found by the first phase: the largest level with an
    /// unsatisfiable maximal-depth query (top-down) or the largest regular
    /// extension level (bottom-up).
    pub first_phase: usize,
    /// The search stopped early on its query budget.
    pub aborted: bool,
}

impl SelSearch {
    pub fn queries(&self) -> u64 {
        self.suffix_queries + self.depth_queries
    }
}

/// Satisfiability of the characteristic formula of `sel` with `Bad`.
fn char_sat(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    sel: Sel,
    opts: &EngineOptions,
) -> Result<bool> {
    let mut s = opts.solver();
    let mut u = Unroller::new(ts);
    encode_characteristic(trace, &mut u, &mut s, sel, false)?;
    is_sat(&mut s, &[])
}

/// Largest `i` whose maximal-depth query `(i, i+1)` is unsatisfiable, then
/// the least `k` with `(i, k)` unsatisfiable. Assumes the trace is
/// extendable, so `(0, 1)` needs no query.
pub fn max_sel_topdown(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    opts: &EngineOptions,
) -> Result<SelSearch> {
    let n = trace.size();
    let mut suffix_queries = 0;
    let mut i = n;
    while i > 0 {
        suffix_queries += 1;
        if !char_sat(ts, trace, Sel::new(i, i + 1), opts)? {
            break;
        }
        i -= 1;
    }
    let mut depth_queries = 0;
    let mut k = 1;
    while k < i + 1 {
        depth_queries += 1;
        if !char_sat(ts, trace, Sel::new(i, k), opts)? {
            break;
        }
        k += 1;
    }
    Ok(SelSearch {
        sel: Sel::new(i, k),
        suffix_queries,
        depth_queries,
        first_phase: i,
        aborted: false,
    })
}

/// Finds the largest regular extension level `j`, then climbs: an
/// unsatisfiable `(j, l)` is recorded and `j` advances, a satisfiable one
/// advances `l`. With `budget`, stops after that many queries and returns
/// the best SEL found so far.
pub fn max_sel_bottomup(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    opts: &EngineOptions,
    budget: Option<u64>,
) -> Result<SelSearch> {
    let n = trace.size();
    let mut suffix_queries = 0;
    let mut j = n;
    while j > 0 {
        suffix_queries += 1;
        if !char_sat(ts, trace, Sel::new(j, 1), opts)? {
            break;
        }
        j -= 1;
    }
    let first_phase = j;
    let mut best = Sel::new(j, 1);
    let mut depth_queries = 0;
    let mut aborted = false;
    j += 1;
    let mut l = 2;
    while l <= j + 1 && j <= n {
        if budget.is_some_and(|b| suffix_queries + depth_queries >= b) {
            aborted = true;
            break;
        }
        depth_queries += 1;
        if char_sat(ts, trace, Sel::new(j, l), opts)? {
            l += 1;
        } else {
            best = Sel::new(j, l);
            j += 1;
        }
    }
    Ok(SelSearch {
        sel: best,
        suffix_queries,
        depth_queries,
        first_phase,
        aborted,
    })
}

/// The vanilla choice `(w, 1)` for the largest regular extension level `w`.
pub fn max_regular_level(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    opts: &EngineOptions,
) -> Result<SelSearch> {
    let mut s = max_sel_bottomup(ts, trace, opts, Some(0))?;
    s.aborted = false;
    Ok(s)
}

/// `Tr[F_level]^k => g(v_k)`: every path of `k` transitions through states
/// of `F_level` ends in `g`.
pub fn is_k_inductive_relative(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    level: usize,
    k: usize,
    f: &Formula,
    g: Edge,
) -> bool {
    let mut s = Solver::new();
    let mut u = Unroller::new(ts);
    for t in 0..k {
        trace.add_frame(&mut u, &mut s, level, t, 0);
        u.add_transition(&mut s, t, 0);
    }
    let e = u.encode_formula(&mut s, f, g, k, 0);
    assert_enc(&mut s, !e, 0);
    s.solve(&[]) == SolveResult::Unsat
}

/// Callbacks into a running engine, for testing and instrumentation.
#[allow(unused_variables)]
pub trait KavyObserver {
    /// A trace that passed the counterexample check.
    fn extendable(&mut self, ts: &TransitionSystem, trace: &InductiveTrace) {}
    fn sel_found(&mut self, trace: &InductiveTrace, search: &SelSearch) {}
    fn interpolant(
        &mut self,
        trace: &InductiveTrace,
        sel: Sel,
        part: &ItpPartition,
        itp: &SeqInterpolant,
    ) {
    }
    fn extended(&mut self, before: &InductiveTrace, sel: Sel, after: &InductiveTrace) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl KavyObserver for NoObserver {}

#[derive(Clone, Debug)]
pub struct Extension {
    pub trace: InductiveTrace,
    pub interpolant: SeqInterpolant,
    pub learned: usize,
}

/// Blocks `!(G_a | (G_{a+1} & I))` in the given window.
#[allow(clippy::too_many_arguments)]
fn block_target(
    ts: &TransitionSystem,
    g: &mut InductiveTrace,
    a: usize,
    next: usize,
    itp: &SeqInterpolant,
    pos: usize,
    window: Window,
    opts: &EngineOptions,
) -> Result<usize> {
    let mut f = Formula::new();
    let ga = g.frame_formula(a, &mut f);
    let gn = g.frame_formula(next, &mut f);
    let i = f.import(&itp.formula, itp.itps[pos]);
    let strengthened = f.and(gn, i);
    let p = f.or(ga, strengthened);
    match pdr_block(ts, g, Target::Property(&f, p), window, opts)? {
        BlockOutcome::Blocked { learned, .. } => Ok(learned),
        BlockOutcome::Counterexample(_) => Err(Error::Contract(format!(
            "target at level {} reached from an initial state during extension",
            window.top()
        ))),
    }
}

/// Extends a monotone clausal safe trace of size `N` to size `N + 1` using a
/// sequence interpolant of the characteristic formula of `sel`.
pub fn kavy_extend(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    sel: Sel,
    opts: &EngineOptions,
    obs: &mut dyn KavyObserver,
) -> Result<Extension> {
    let n = trace.size();
    check_sel(sel, n)?;
    let part = ItpPartition::characteristic(ts, trace, sel)?;
    let itp = refute_and_interpolate(&part)?
        .ok_or_else(|| Error::Contract(format!("{sel} is not a strong extension level")))?;
    if opts.validate_itp {
        if let Err(v) = validate_seq_interpolant(&itp, &part) {
            return Err(Error::Contract(format!(
                "interpolant for {sel} violates {v:?}"
            )));
        }
        if let Err(msg) = check_heart_shape(ts, trace, sel, &itp) {
            return Err(Error::Contract(format!("interpolant for {sel}: {msg}")));
        }
    }
    obs.interpolant(trace, sel, &part, &itp);
    let (i, k) = (sel.i, sel.k);
    let start = i + 1 - k;
    // I_m sits at position m - start - 1
    let pos = |m: usize| m - start - 1;
    let mut g = trace.clone();
    g.push_frame();
    let mut learned = 0;
    for j in start..i {
        learned += block_target(
            ts,
            &mut g,
            j,
            i + 1,
            &itp,
            pos(j + 1),
            Window::pair(i),
            opts,
        )?;
    }
    let window = if i == 0 {
        Window::single()
    } else {
        Window::pair(i)
    };
    learned += block_target(ts, &mut g, i, i + 1, &itp, pos(i + 1), window, opts)?;
    for j in i + 1..=n {
        learned += block_target(
            ts,
            &mut g,
            j,
            j + 1,
            &itp,
            pos(j + 1),
            Window::pair(j),
            opts,
        )?;
        // only above G_{i+1}, so that G_{i+1} stays k-inductive relative to F_i
        g.pdr_push_from(ts, i + 1);
    }
    Ok(Extension {
        trace: g,
        interpolant: itp,
        learned,
    })
}

/// How the main loop picks its extension level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Maximal strong extension level.
    Kavy,
    /// Largest regular extension level with depth 1.
    Vanilla,
}

/// `Tr[F^0] & Bad(v_{N+1})`; on a model, the inputs of frames `0..=N+1`.
fn counterexample(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    opts: &EngineOptions,
) -> Result<Option<Witness>> {
    let mut s = opts.solver();
    let mut u = Unroller::new(ts);
    encode_characteristic(trace, &mut u, &mut s, Sel::new(0, 1), false)?;
    if is_sat(&mut s, &[])? {
        let inputs = (0..=trace.size() + 1)
            .map(|t| u.read_inputs(&s, t))
            .collect();
        Ok(Some(Witness { inputs }))
    } else {
        Ok(None)
    }
}

fn check_trace_invariant(ts: &TransitionSystem, trace: &InductiveTrace) -> Result<()> {
    if !trace.is_trace(ts) || !trace.is_monotone(ts) || !trace.is_safe(ts) {
        return Err(Error::Contract(format!(
            "trace of size {} is not a monotone safe inductive trace",
            trace.size()
        )));
    }
    Ok(())
}

/// The main loop with an observer.
pub fn run_observed(
    ts: &TransitionSystem,
    mode: Mode,
    opts: &EngineOptions,
    obs: &mut dyn KavyObserver,
) -> Result<EngineRun> {
    instrumented(|stats, start, q0| {
        if let Some(w) = initial_violation(ts, opts)? {
            return Ok(CheckResult::Unsafe(w));
        }
        let mut trace = InductiveTrace::new(ts);
        loop {
            let n = trace.size();
            stats.frames = n;
            if n >= opts.max_frames {
                return Ok(CheckResult::Unknown { bound: n });
            }
            opts.check_deadline()?;
            if opts.debug_checks {
                check_trace_invariant(ts, &trace)?;
            }
            if let Some(w) = counterexample(ts, &trace, opts)? {
                return Ok(CheckResult::Unsafe(w));
            }
            obs.extendable(ts, &trace);
            let search = match (mode, opts.sel) {
                (Mode::Vanilla, _) => max_regular_level(ts, &trace, opts)?,
                (Mode::Kavy, SelStrategy::TopDown) => max_sel_topdown(ts, &trace, opts)?,
                (Mode::Kavy, SelStrategy::BottomUp) => {
                    max_sel_bottomup(ts, &trace, opts, opts.sel_query_budget)?
                }
            };
            obs.sel_found(&trace, &search);
            let sel = search.sel;
            stats.first_sel.get_or_insert(sel);
            stats.max_sel_k = Some(stats.max_sel_k.unwrap_or(0).max(sel.k));
            let ext = kavy_extend(ts, &trace, sel, opts, obs)?;
            stats.interpolants += 1;
            obs.extended(&trace, sel, &ext.trace);
            trace = ext.trace;
            trace.pdr_push(ts);
            stats.frames = trace.size();
            stats.iterations.push(IterationStats {
                frames: trace.size(),
                sel: Some(sel),
                sat_queries: sat::solve_calls() - q0,
                learned_clauses: ext.learned,
                elapsed: start.elapsed(),
            });
            if let Some(i) = trace.closed_at(ts) {
                return Ok(CheckResult::Safe(Certificate::Invariant(
                    trace.frame_clauses(i),
                )));
            }
        }
    })
}

pub fn kavy_engine(ts: &TransitionSystem, opts: &EngineOptions) -> Result<EngineRun> {
    run_observed(ts, Mode::Kavy, opts, &mut NoObserver)
}

pub fn vanilla_engine(ts: &TransitionSystem, opts: &EngineOptions) -> Result<EngineRun> {
    run_observed(ts, Mode::Vanilla, opts, &mut NoObserver)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::check_result;
    use crate::family::{gen_counter, gen_counter_hitting, gen_shift};
    use crate::state::{Clause, LatchLit};

    fn below(bound: u64) -> Vec<Clause> {
        (bound..256)
            .map(|v| {
                Clause::new((0..8).map(|i| LatchLit::new(i, v >> i & 1 == 0)).collect()).unwrap()
            })
            .collect()
    }

    fn example_trace(ts: &TransitionSystem) -> InductiveTrace {
        InductiveTrace::from_frames(ts, &[below(66)])
    }

    #[test]
    fn example_sel_is_one_two() {
        let ts = gen_counter(8, 64, 66).unwrap();
        let t = example_trace(&ts);
        let opts = EngineOptions::default();
        assert_eq!(max_sel_topdown(&ts, &t, &opts).unwrap().sel, Sel::new(1, 2));
        let b = max_sel_bottomup(&ts, &t, &opts, None).unwrap();
        assert_eq!(b.sel, Sel::new(1, 2));
        assert_eq!(b.first_phase, 0);
    }

    #[test]
    fn stuck_latch_sel_is_one_one() {
        let ts = crate::aiger::parse_aiger(b"aag 1 0 1 0 0 1\n2 2\n2\n").unwrap();
        let t = InductiveTrace::from_frames(
            &ts,
            &[vec![Clause::new(vec![LatchLit::new(0, false)]).unwrap()]],
        );
        let opts = EngineOptions::default();
        assert_eq!(max_sel_topdown(&ts, &t, &opts).unwrap().sel, Sel::new(1, 1));
    }

    #[test]
    fn example_extension_without_generalization() {
        let ts = gen_counter(8, 64, 66).unwrap();
        let t = example_trace(&ts);
        let opts = EngineOptions {
            gen_enabled: false,
            validate_itp: true,
            ..EngineOptions::default()
        };
        let ext = kavy_extend(&ts, &t, Sel::new(1, 2), &opts, &mut NoObserver).unwrap();
        let g = ext.trace;
        assert_eq!(g.size(), 2);
        assert!(g.is_trace(&ts) && g.is_monotone(&ts) && g.is_safe(&ts));
        assert!(g.is_stronger_than(&t, &ts));
        let mut f = Formula::new();
        let g2 = g.frame_formula(2, &mut f);
        assert!(is_k_inductive_relative(&ts, &t, 1, 2, &f, g2));
        // G_1 excludes 65 and G_2 implies c < 66
        let s65: Vec<bool> = (0..8).map(|b| 65u64 >> b & 1 == 1).collect();
        let g1 = g.frame_formula(1, &mut f);
        assert!(!f.eval(g1, &s65));
        assert!(crate::trace::InductiveTrace::from_frames(&ts, &[g.frame_clauses(2)]).is_safe(&ts));
    }

    #[test]
    fn counter_is_safe() {
        let ts = gen_counter(8, 64, 66).unwrap();
        for gen in [true, false] {
            let opts = EngineOptions {
                gen_enabled: gen,
                validate_itp: true,
                debug_checks: true,
                ..EngineOptions::default()
            };
            let run = kavy_engine(&ts, &opts).unwrap();
            assert!(run.result.is_safe(), "gen {gen}: {}", run.result);
            assert!(check_result(&run.result, &ts).unwrap());
            let run = vanilla_engine(&ts, &opts).unwrap();
            assert!(run.result.is_safe());
            assert!(check_result(&run.result, &ts).unwrap());
        }
    }

    #[test]
    fn counter_hitting_three_is_unsafe() {
        let ts = gen_counter_hitting(8, 64, 3).unwrap();
        let run = kavy_engine(&ts, &EngineOptions::default()).unwrap();
        match &run.result {
            CheckResult::Unsafe(w) => assert_eq!(w.depth(), 3),
            other => panic!("{other}"),
        }
        assert!(check_result(&run.result, &ts).unwrap());
    }

    #[test]
    fn shift_is_safe() {
        let ts = gen_shift(5).unwrap();
        let run = kavy_engine(&ts, &EngineOptions::default()).unwrap();
        assert!(run.result.is_safe());
        assert!(check_result(&run.result, &ts).unwrap());
    }
}
