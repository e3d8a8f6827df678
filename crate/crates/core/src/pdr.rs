//! Recursive blocking of bad states over a window of an inductive trace,
//! inductive generalization, and a standalone PDR engine.
//!
//! A blocking call sees the trace through a [`Window`]: window level 0 is
//! `Init` and window level `w >= 1` is the trace frame `base + w - 1`.
//! Learned clauses at window level `w` are added to that trace frame and,
//! by the delta encoding, to every frame below it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::aiger::TransitionSystem;
use crate::check::{
    is_sat, Certificate, CheckResult, EngineOptions, EngineRun, IterationStats, Stats, Witness,
};
use crate::cnf::{Enc, Unroller};
use crate::engines::instrumented;
use crate::error::{Error, Result};
use crate::formula::{Edge, Formula};
use crate::sat::{self, Lit, Solver};
use crate::state::{Clause, Cube, LatchLit};
use crate::trace::InductiveTrace;

/// The set of states to block: the states satisfying `Bad` for some input,
/// or the complement of a property over latches.
#[derive(Clone, Copy)]
pub enum Target<'f> {
    Bad,
    Property(&'f Formula, Edge),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub base: usize,
    pub height: usize,
    /// The caller guarantees that no target state has a predecessor in the
    /// frame below the top; finding one is a contract violation.
    pub strict: bool,
}

impl Window {
    /// The whole trace `[F_0, .., F_n]`.
    pub fn full(n: usize) -> Window {
        Window {
            base: 1,
            height: n,
            strict: false,
        }
    }

    /// `[Init, F_a, F_{a+1}]`.
    pub fn pair(a: usize) -> Window {
        assert!(a >= 1, "pair window starts at level 1");
        Window {
            base: a,
            height: 2,
            strict: true,
        }
    }

    /// `[Init, F_1]`.
    pub fn single() -> Window {
        Window {
            base: 1,
            height: 1,
            strict: true,
        }
    }

    /// Trace level of window level `w`.
    pub fn real(&self, w: usize) -> usize {
        if w == 0 {
            0
        } else {
            self.base + w - 1
        }
    }

    pub fn top(&self) -> usize {
        self.real(self.height)
    }
}

/// A state to be blocked at a window level.
#[derive(Clone, Debug)]
pub struct ProofObligation {
    pub cube: Cube,
    pub level: usize,
    state: Vec<bool>,
    /// Inputs taking `state` to the parent's state, or, at the top, inputs
    /// under which the target is violated.
    inputs: Vec<bool>,
    parent: Option<usize>,
}

/// A path from an initial state into the target, read off the obligations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CexChain {
    pub states: Vec<Vec<bool>>,
    pub inputs: Vec<Vec<bool>>,
}

impl CexChain {
    pub fn witness(&self) -> Witness {
        Witness {
            inputs: self.inputs.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockOutcome {
    /// The top frame now excludes the target. `min_level` is the least
    /// trace level that received a clause (`top + 1` if none did).
    Blocked {
        min_level: usize,
        learned: usize,
    },
    Counterexample(CexChain),
}

/// Incremental solver over `F(v_0) & Tr(v_0, v_1)` with one activation
/// literal per trace level.
struct RelSolver<'a> {
    s: Solver,
    u: Unroller<'a>,
    init_act: Lit,
    /// `acts[r]` guards the delta clauses stored at level `r`, for
    /// `base <= r <= N`.
    acts: Vec<Option<Lit>>,
    target_act: Lit,
    window: Window,
}

impl<'a> RelSolver<'a> {
    fn new(
        ts: &'a TransitionSystem,
        trace: &InductiveTrace,
        target: Target,
        window: Window,
        opts: &EngineOptions,
    ) -> RelSolver<'a> {
        let mut s = opts.solver();
        let mut u = Unroller::new(ts);
        for l in 0..ts.num_latches() {
            u.latch_var(&mut s, l, 0);
            u.latch_var(&mut s, l, 1);
        }
        u.add_transition(&mut s, 0, 0);
        let init_act = Lit::pos(s.new_var());
        for &l in trace.init().lits() {
            let x = u.state_lit(&mut s, l, 0);
            s.add_clause(&[!init_act, x]);
        }
        let mut acts = vec![None; trace.size() + 1];
        for (r, act) in acts.iter_mut().enumerate().skip(window.base) {
            let a = Lit::pos(s.new_var());
            for c in trace.delta(r) {
                u.add_clause_guarded(&mut s, c, 0, a, 0);
            }
            *act = Some(a);
        }
        let target_act = Lit::pos(s.new_var());
        let violated = match target {
            Target::Bad => u.encode_bad(&mut s, 0, 0),
            Target::Property(f, e) => !u.encode_formula(&mut s, f, e, 0, 0),
        };
        match violated {
            Enc::Const(true) => {}
            Enc::Const(false) => {
                s.add_clause(&[!target_act]);
            }
            Enc::Lit(l) => {
                s.add_clause(&[!target_act, l]);
            }
        }
        RelSolver {
            s,
            u,
            init_act,
            acts,
            target_act,
            window,
        }
    }

    /// Assumptions selecting window level `w` at frame 0.
    fn frame(&self, w: usize) -> Vec<Lit> {
        if w == 0 {
            vec![self.init_act]
        } else {
            self.acts[self.window.real(w)..]
                .iter()
                .flatten()
                .copied()
                .collect()
        }
    }

    fn lits_at(&mut self, lits: &[LatchLit], t: usize) -> Vec<Lit> {
        lits.iter()
            .map(|&l| self.u.state_lit(&mut self.s, l, t))
            .collect()
    }

    /// A state of the top frame violating the target, with the inputs.
    fn target_state(&mut self) -> Result<Option<(Vec<bool>, Vec<bool>)>> {
        let mut a = self.frame(self.window.height);
        a.push(self.target_act);
        if is_sat(&mut self.s, &a)? {
            Ok(Some((
                self.u.read_state(&self.s, 0),
                self.u.read_inputs(&self.s, 0),
            )))
        } else {
            Ok(None)
        }
    }

    /// A predecessor of `cube` in window level `w`, with the step's inputs.
    fn predecessor(&mut self, cube: &Cube, w: usize) -> Result<Option<(Vec<bool>, Vec<bool>)>> {
        let mut a = self.frame(w);
        let next = self.lits_at(cube.lits(), 1);
        a.extend(next);
        if is_sat(&mut self.s, &a)? {
            Ok(Some((
                self.u.read_state(&self.s, 0),
                self.u.read_inputs(&self.s, 0),
            )))
        } else {
            Ok(None)
        }
    }

    /// `F_w & c & Tr => c'`, with `c` installed under a throwaway
    /// activation literal.
    fn relatively_inductive(&mut self, c: &Clause, w: usize) -> Result<bool> {
        let act = Lit::pos(self.s.new_var());
        self.u.add_clause_guarded(&mut self.s, c, 0, act, 0);
        let mut a = self.frame(w);
        a.push(act);
        let next = self.lits_at(c.lits(), 1);
        a.extend(next.into_iter().map(|l| !l));
        let sat = is_sat(&mut self.s, &a);
        self.s.add_clause(&[!act]);
        Ok(!sat?)
    }

    fn add_learned(&mut self, c: &Clause, real: usize) {
        let act = self.acts[real].expect("level inside window");
        self.u.add_clause_guarded(&mut self.s, c, 0, act, 0);
    }
}

/// Drops literals of `!cube` in latch order while the clause stays
/// satisfied by the initial state and inductive relative to window level
/// `w - 1`. With generalization off, returns `!cube` unchanged.
fn ind_gen(
    rel: &mut RelSolver,
    init: &[bool],
    cube: &Cube,
    w: usize,
    enabled: bool,
) -> Result<Clause> {
    let mut lits: Vec<LatchLit> = cube.negate().lits().to_vec();
    if !enabled {
        return Ok(cube.negate());
    }
    let order = lits.clone();
    for l in order {
        if lits.len() == 1 {
            break;
        }
        let cand: Vec<LatchLit> = lits.iter().copied().filter(|&x| x != l).collect();
        if !cand.iter().any(|x| x.eval(init)) {
            continue;
        }
        let c = Clause::new(cand.clone()).expect("subclause of a consistent clause");
        if rel.relatively_inductive(&c, w - 1)? {
            lits = cand;
        }
    }
    Ok(Clause::new(lits).expect("subclause of a consistent clause"))
}

/// Blocks every target state of the window's top frame, strengthening the
/// trace in place. On a counterexample the trace keeps the clauses learned
/// so far, which remain sound.
pub fn pdr_block(
    ts: &TransitionSystem,
    trace: &mut InductiveTrace,
    target: Target,
    window: Window,
    opts: &EngineOptions,
) -> Result<BlockOutcome> {
    if window.top() > trace.size() || window.height == 0 {
        return Err(Error::Contract(format!(
            "window {window:?} does not fit a trace of size {}",
            trace.size()
        )));
    }
    let init = ts.initial_state();
    let mut rel = RelSolver::new(ts, trace, target, window, opts);
    let mut nodes: Vec<ProofObligation> = Vec::new();
    let mut queue: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut min_level = window.top() + 1;
    let mut learned = 0;
    loop {
        if queue.is_empty() {
            match rel.target_state()? {
                None => break,
                Some((state, inputs)) => {
                    nodes.push(ProofObligation {
                        cube: Cube::from_state(&state),
                        level: window.height,
                        state,
                        inputs,
                        parent: None,
                    });
                    queue.push(Reverse((window.height, nodes.len() - 1)));
                }
            }
        }
        let Reverse((d, idx)) = queue.pop().expect("queue refilled above");
        if d == 0 || nodes[idx].state == init {
            return Ok(BlockOutcome::Counterexample(chain(&nodes, idx)));
        }
        let cube = nodes[idx].cube.clone();
        match rel.predecessor(&cube, d - 1)? {
            Some(_) if window.strict => {
                return Err(Error::Contract(format!(
                    "a target state at trace level {} has a predecessor at level {}",
                    window.real(d),
                    window.real(d - 1)
                )));
            }
            Some((state, inputs)) => {
                nodes.push(ProofObligation {
                    cube: Cube::from_state(&state),
                    level: d - 1,
                    state,
                    inputs,
                    parent: Some(idx),
                });
                queue.push(Reverse((d - 1, nodes.len() - 1)));
                queue.push(Reverse((d, idx)));
            }
            None => {
                let c = ind_gen(&mut rel, &init, &cube, d, opts.gen_enabled)?;
                let real = window.real(d);
                if trace.add_clause(c.clone(), real) {
                    rel.add_learned(&c, real);
                    learned += 1;
                }
                min_level = min_level.min(real);
            }
        }
    }
    Ok(BlockOutcome::Blocked { min_level, learned })
}

fn chain(nodes: &[ProofObligation], mut idx: usize) -> CexChain {
    let mut states = Vec::new();
    let mut inputs = Vec::new();
    loop {
        states.push(nodes[idx].state.clone());
        inputs.push(nodes[idx].inputs.clone());
        match nodes[idx].parent {
            Some(p) => idx = p,
            None => break,
        }
    }
    CexChain { states, inputs }
}

/// `Init => c` and `F_{level-1} & c & Tr => c'`, by fresh solvers.
pub fn is_relatively_inductive_clause(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    c: &Clause,
    level: usize,
) -> bool {
    if !c.eval(&ts.initial_state()) {
        return false;
    }
    let mut s = Solver::new();
    let mut u = Unroller::new(ts);
    trace.add_frame(&mut u, &mut s, level - 1, 0, 0);
    u.add_clause(&mut s, c, 0, 0);
    u.add_transition(&mut s, 0, 0);
    let neg: Vec<Lit> = c
        .lits()
        .iter()
        .map(|&l| !u.state_lit(&mut s, l, 1))
        .collect();
    s.solve(&neg) == sat::SolveResult::Unsat
}

/// Checks `Init & Bad`; returns the inputs of a violating initial state.
pub(crate) fn initial_violation(
    ts: &TransitionSystem,
    opts: &EngineOptions,
) -> Result<Option<Witness>> {
    let mut s = opts.solver();
    let mut u = Unroller::new(ts);
    u.add_init(&mut s, 0, 0);
    u.add_bad(&mut s, 0, 0);
    if is_sat(&mut s, &[])? {
        Ok(Some(Witness {
            inputs: vec![u.read_inputs(&s, 0)],
        }))
    } else {
        Ok(None)
    }
}

/// Full PDR: extend the trace by one frame, block `Bad` in it, push, and
/// stop when the trace closes.
pub fn pdr_engine(ts: &TransitionSystem, opts: &EngineOptions) -> Result<EngineRun> {
    instrumented(|stats, start, q0| pdr_loop(ts, opts, stats, start, q0))
}

fn pdr_loop(
    ts: &TransitionSystem,
    opts: &EngineOptions,
    stats: &mut Stats,
    start: Instant,
    q0: u64,
) -> Result<CheckResult> {
    if let Some(w) = initial_violation(ts, opts)? {
        return Ok(CheckResult::Unsafe(w));
    }
    let mut trace = InductiveTrace::new(ts);
    for n in 1..=opts.max_frames {
        opts.check_deadline()?;
        trace.push_frame();
        stats.frames = n;
        let outcome = pdr_block(ts, &mut trace, Target::Bad, Window::full(n), opts)?;
        let learned = match outcome {
            BlockOutcome::Counterexample(cex) => return Ok(CheckResult::Unsafe(cex.witness())),
            BlockOutcome::Blocked { learned, .. } => learned,
        };
        trace.pdr_push(ts);
        stats.iterations.push(IterationStats {
            frames: n,
            sel: None,
            sat_queries: sat::solve_calls() - q0,
            learned_clauses: learned,
            elapsed: start.elapsed(),
        });
        if let Some(i) = trace.closed_at(ts) {
            return Ok(CheckResult::Safe(Certificate::Invariant(
                trace.frame_clauses(i),
            )));
        }
    }
    Ok(CheckResult::Unknown {
        bound: opts.max_frames,
    })
}
