//! Independent checking of invariants and witnesses.
//!
//! The checker re-encodes the circuit with its own scheme: a latch in
//! frame `t + 1` is the literal of its next-state function in frame `t`, so
//! no engine variable map or transition clause is reused.

use crate::aiger::{AigLit, TransitionSystem};
use crate::check::{Certificate, CheckResult, Witness};
use crate::error::{Error, Result};
use crate::sat::{Lit, SolveResult, Solver};
use crate::state::Clause;
use crate::trace::InductiveTrace;

struct Frames<'a> {
    ts: &'a TransitionSystem,
    s: Solver,
    truth: Lit,
    /// Solver literal of every AIG variable, per frame.
    vals: Vec<Vec<Lit>>,
}

impl<'a> Frames<'a> {
    fn new(ts: &'a TransitionSystem) -> Frames<'a> {
        let mut s = Solver::new();
        let truth = Lit::pos(s.new_var());
        s.add_clause(&[truth]);
        Frames {
            ts,
            s,
            truth,
            vals: Vec::new(),
        }
    }

    fn lit(&self, t: usize, a: AigLit) -> Lit {
        let base = if a.var() == 0 {
            !self.truth
        } else {
            self.vals[t][a.var() as usize]
        };
        if a.is_negated() {
            !base
        } else {
            base
        }
    }

    /// Adds frame `t = vals.len()`, with free latches when it is the first.
    fn push(&mut self) {
        let ts = self.ts;
        let t = self.vals.len();
        let mut v = Vec::with_capacity(ts.max_var() as usize + 1);
        v.push(!self.truth);
        for _ in 0..ts.num_inputs() {
            v.push(Lit::pos(self.s.new_var()));
        }
        for l in 0..ts.num_latches() {
            let x = if t == 0 {
                Lit::pos(self.s.new_var())
            } else {
                self.lit(t - 1, ts.latches()[l].next)
            };
            v.push(x);
        }
        self.vals.push(v);
        for &(a, b) in ts.ands() {
            let (la, lb) = (self.lit(t, a), self.lit(t, b));
            let g = Lit::pos(self.s.new_var());
            self.s.add_clause(&[!g, la]);
            self.s.add_clause(&[!g, lb]);
            self.s.add_clause(&[g, !la, !lb]);
            self.vals[t].push(g);
        }
    }

    fn latch(&self, t: usize, l: usize) -> Lit {
        self.vals[t][1 + self.ts.num_inputs() + l]
    }

    fn bad(&self, t: usize) -> Lit {
        self.lit(t, self.ts.bad())
    }

    fn assert_init(&mut self) {
        for (l, latch) in self.ts.latches().iter().enumerate() {
            let x = self.latch(0, l);
            self.s.add_clause(&[if latch.init { x } else { !x }]);
        }
    }

    fn clause_lits(&self, t: usize, c: &Clause) -> Vec<Lit> {
        c.lits()
            .iter()
            .map(|l| {
                let x = self.latch(t, l.latch());
                if l.is_positive() {
                    x
                } else {
                    !x
                }
            })
            .collect()
    }

    fn assert_cnf(&mut self, t: usize, inv: &[Clause]) {
        for c in inv {
            let lits = self.clause_lits(t, c);
            self.s.add_clause(&lits);
        }
    }

    /// Asserts that some clause of `inv` is false in frame `t`.
    fn assert_not_cnf(&mut self, t: usize, inv: &[Clause]) {
        let mut some = Vec::with_capacity(inv.len());
        for c in inv {
            let sel = Lit::pos(self.s.new_var());
            for l in self.clause_lits(t, c) {
                self.s.add_clause(&[!sel, !l]);
            }
            some.push(sel);
        }
        self.s.add_clause(&some);
    }

    fn unsat(&mut self) -> bool {
        self.s.solve(&[]) == SolveResult::Unsat
    }
}

/// `Init => Inv`, `Inv & Tr => Inv'` and `Inv => !Bad`, each certified by
/// an UNSAT answer of a fresh solver.
pub fn check_invariant(inv: &[Clause], ts: &TransitionSystem) -> bool {
    let mut f = Frames::new(ts);
    f.push();
    f.assert_init();
    f.assert_not_cnf(0, inv);
    if !f.unsat() {
        return false;
    }
    let mut f = Frames::new(ts);
    f.push();
    f.push();
    f.assert_cnf(0, inv);
    f.assert_not_cnf(1, inv);
    if !f.unsat() {
        return false;
    }
    let mut f = Frames::new(ts);
    f.push();
    f.assert_cnf(0, inv);
    let b = f.bad(0);
    f.s.add_clause(&[b]);
    f.unsat()
}

/// `!Bad` holds for the first `k` steps from `Init`, and every path of `k+1`
/// states (pairwise distinct if `simple_path`) with `!Bad` in the first `k`
/// avoids `Bad` in the last.
pub fn check_k_inductive(ts: &TransitionSystem, k: usize, simple_path: bool) -> bool {
    if k == 0 {
        return false;
    }
    let mut f = Frames::new(ts);
    for _ in 0..k {
        f.push();
    }
    f.assert_init();
    let bads: Vec<Lit> = (0..k).map(|t| f.bad(t)).collect();
    f.s.add_clause(&bads);
    if !f.unsat() {
        return false;
    }
    let mut f = Frames::new(ts);
    for _ in 0..=k {
        f.push();
    }
    for t in 0..k {
        let b = f.bad(t);
        f.s.add_clause(&[!b]);
    }
    let b = f.bad(k);
    f.s.add_clause(&[b]);
    if simple_path {
        for i in 0..=k {
            for j in i + 1..=k {
                let mut some = Vec::new();
                for l in 0..ts.num_latches() {
                    let (x, y) = (f.latch(i, l), f.latch(j, l));
                    let d = Lit::pos(f.s.new_var());
                    f.s.add_clause(&[!d, x, y]);
                    f.s.add_clause(&[!d, !x, !y]);
                    some.push(d);
                }
                f.s.add_clause(&some);
            }
        }
    }
    f.unsat()
}

/// The states visited under a stimulus and the first frame where `Bad`
/// held.
#[derive(Clone, Debug)]
pub struct Replay {
    pub states: Vec<Vec<bool>>,
    pub first_bad: Option<usize>,
}

/// Simulates the stimulus from the initial state.
pub fn replay(w: &Witness, ts: &TransitionSystem) -> Result<Replay> {
    let mut state = ts.initial_state();
    let mut states = Vec::with_capacity(w.inputs.len());
    let mut first_bad = None;
    for (t, inp) in w.inputs.iter().enumerate() {
        if inp.len() != ts.num_inputs() {
            return Err(Error::Usage(format!(
                "witness frame {t} has {} inputs, the circuit has {}",
                inp.len(),
                ts.num_inputs()
            )));
        }
        let (next, bad) = ts.step(&state, inp);
        states.push(state);
        if bad && first_bad.is_none() {
            first_bad = Some(t);
        }
        state = next;
    }
    Ok(Replay { states, first_bad })
}

/// The stimulus drives the circuit into `Bad` at its last frame. Frames
/// with the wrong number of inputs are an error.
pub fn check_witness(w: &Witness, ts: &TransitionSystem) -> Result<bool> {
    if w.inputs.is_empty() {
        return Ok(false);
    }
    let r = replay(w, ts)?;
    let last = w.inputs.len() - 1;
    let (_, bad) = ts.step(&r.states[last], &w.inputs[last]);
    Ok(bad)
}

/// Explains why a witness fails, for diagnostics.
pub fn witness_diagnostic(w: &Witness, ts: &TransitionSystem) -> String {
    match replay(w, ts) {
        Err(e) => e.to_string(),
        Ok(r) => match r.first_bad {
            None => format!("bad never holds in {} simulated frames", w.inputs.len()),
            Some(t) if t + 1 == w.inputs.len() => "witness is valid".into(),
            Some(t) => format!(
                "bad first holds at frame {t}, not at the last frame {}",
                w.inputs.len() - 1
            ),
        },
    }
}

/// `F_i` at the least closing level `i`.
pub fn extract_invariant(trace: &InductiveTrace, ts: &TransitionSystem) -> Result<Vec<Clause>> {
    match trace.closed_at(ts) {
        Some(i) => Ok(trace.frame_clauses(i)),
        None => Err(Error::Contract("trace is not closed".into())),
    }
}

/// Checks whatever evidence a verdict carries. Unknown results pass.
pub fn check_result(result: &CheckResult, ts: &TransitionSystem) -> Result<bool> {
    match result {
        CheckResult::Safe(Certificate::Invariant(inv)) => Ok(check_invariant(inv, ts)),
        CheckResult::Safe(Certificate::KInductive { k, simple_path }) => {
            Ok(check_k_inductive(ts, *k, *simple_path))
        }
        CheckResult::Unsafe(w) => check_witness(w, ts),
        CheckResult::Unknown { .. } => Ok(true),
    }
}

/// Writes an invariant as text: one clause of latch literals per line.
pub fn invariant_text(inv: &[Clause]) -> String {
    let mut out = format!("c invariant with {} clauses\n", inv.len());
    for c in inv {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
