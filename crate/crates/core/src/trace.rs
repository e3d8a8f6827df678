//! Inductive traces: sequences of clausal frames `F_0 .. F_N` with `F_0 = Init`.
//!
//! Frames are delta-encoded. A clause is stored once, at the highest level
//! where it is known to hold, and frame `F_i` (for `i >= 1`) is the union of
//! the deltas at levels `>= i`. Monotonicity is therefore syntactic.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

use crate::aiger::TransitionSystem;
use crate::cnf::{ClauseSink, Unroller};
use crate::error::{Error, Result};
use crate::formula::{Edge, Formula};
use crate::sat::{Lit, SolveResult, Solver};
use crate::state::{Clause, Cube};

/// A strong extension level `(i, k)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sel {
    pub i: usize,
    pub k: usize,
}

impl Sel {
    pub fn new(i: usize, k: usize) -> Sel {
        Sel { i, k }
    }

    /// `1 <= k <= i + 1 <= N + 1`.
    pub fn is_valid_for(&self, n: usize) -> bool {
        self.k >= 1 && self.k <= self.i + 1 && self.i <= n
    }
}

impl Ord for Sel {
    /// Larger level first, then smaller depth.
    fn cmp(&self, other: &Sel) -> Ordering {
        self.i.cmp(&other.i).then(other.k.cmp(&self.k))
    }
}

impl PartialOrd for Sel {
    fn partial_cmp(&self, other: &Sel) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductiveTrace {
    init: Cube,
    /// `deltas[0]` is always empty; `F_0` is the initial cube.
    deltas: Vec<Vec<Clause>>,
}

impl InductiveTrace {
    /// The trace `[Init]` of size 0.
    pub fn new(ts: &TransitionSystem) -> InductiveTrace {
        InductiveTrace {
            init: ts.initial_cube(),
            deltas: vec![Vec::new()],
        }
    }

    /// Builds a trace from explicit frames `F_1 .. F_N` (each a clause set).
    /// Clauses are placed at the highest level whose frame contains them.
    pub fn from_frames(ts: &TransitionSystem, frames: &[Vec<Clause>]) -> InductiveTrace {
        let mut t = InductiveTrace::new(ts);
        for _ in frames {
            t.push_frame();
        }
        for (idx, f) in frames.iter().enumerate() {
            for c in f {
                t.add_clause(c.clone(), idx + 1);
            }
        }
        t
    }

    /// Size `N` (index of the last frame).
    pub fn size(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn init(&self) -> &Cube {
        &self.init
    }

    /// Appends the frame `F_{N+1} = T`.
    pub fn push_frame(&mut self) {
        self.deltas.push(Vec::new());
    }

    pub fn delta(&self, level: usize) -> &[Clause] {
        &self.deltas[level]
    }

    /// Clauses of `F_level` for `level >= 1`; beyond `N` the frame is `T`.
    pub fn frame_clauses(&self, level: usize) -> Vec<Clause> {
        assert!(level >= 1, "F_0 is the initial cube");
        if level > self.size() {
            return Vec::new();
        }
        self.deltas[level..].iter().flatten().cloned().collect()
    }

    pub fn num_clauses(&self) -> usize {
        self.deltas.iter().map(|d| d.len()).sum()
    }

    /// Adds `c` to every frame `1..=level`. Returns false if the clause is
    /// already subsumed at that level. Clauses at levels `<= level` that `c`
    /// subsumes are dropped.
    pub fn add_clause(&mut self, c: Clause, level: usize) -> bool {
        assert!(
            level >= 1 && level <= self.size(),
            "clause level out of range"
        );
        if self.deltas[level..]
            .iter()
            .flatten()
            .any(|d| d.subsumes(&c))
        {
            return false;
        }
        for d in self.deltas[1..=level].iter_mut() {
            d.retain(|x| !c.subsumes(x));
        }
        self.deltas[level].push(c);
        true
    }

    /// Moves a clause from `level` to `level + 1`.
    fn promote(&mut self, level: usize, idx: usize) {
        let c = self.deltas[level].swap_remove(idx);
        self.deltas[level + 1].push(c);
    }

    /// `F_level` as a latch formula.
    pub fn frame_formula(&self, level: usize, f: &mut Formula) -> Edge {
        if level == 0 {
            f.cube(&self.init)
        } else {
            let clauses = self.frame_clauses(level);
            f.cnf(clauses.iter())
        }
    }

    /// Adds `F_level(v_t)` to `sink`.
    pub fn add_frame<S: ClauseSink>(
        &self,
        u: &mut Unroller,
        sink: &mut S,
        level: usize,
        t: usize,
        group: u32,
    ) {
        if level == 0 {
            u.add_cube(sink, &self.init, t, group);
        } else if level <= self.size() {
            for d in &self.deltas[level..] {
                u.add_clauses(sink, d.iter(), t, group);
            }
        }
    }

    /// Stable text dump: one section per level listing its delta clauses.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "level 0: init {}", self.init)?;
        for (i, d) in self.deltas.iter().enumerate().skip(1) {
            writeln!(out, "level {i}:")?;
            let mut sorted = d.clone();
            sorted.sort();
            for c in sorted {
                writeln!(out, "  {c}")?;
            }
        }
        Ok(())
    }

    /// Each frame strengthened or equal: `self_i => other_i` for all i.
    /// `self` must not be shorter than `other`.
    pub fn is_stronger_than(&self, other: &InductiveTrace, ts: &TransitionSystem) -> bool {
        if self.size() < other.size() {
            return false;
        }
        (1..=other.size()).all(|i| {
            let mut s = Solver::new();
            let mut u = Unroller::new(ts);
            self.add_frame(&mut u, &mut s, i, 0, 0);
            other.frame_clauses(i).iter().all(|c| {
                let neg: Vec<Lit> = c
                    .lits()
                    .iter()
                    .map(|&l| !u.state_lit(&mut s, l, 0))
                    .collect();
                s.solve(&neg) == SolveResult::Unsat
            })
        })
    }

    /// Consecution `F_i & Tr => F_{i+1}'` for `0 <= i < N` (initiation holds
    /// by construction). One SAT call per clause of each next frame.
    pub fn is_trace(&self, ts: &TransitionSystem) -> bool {
        (0..self.size()).all(|i| {
            let mut s = Solver::new();
            let mut u = Unroller::new(ts);
            self.add_frame(&mut u, &mut s, i, 0, 0);
            u.add_transition(&mut s, 0, 0);
            self.frame_clauses(i + 1).iter().all(|c| {
                let neg: Vec<Lit> = c
                    .lits()
                    .iter()
                    .map(|&l| !u.state_lit(&mut s, l, 1))
                    .collect();
                s.solve(&neg) == SolveResult::Unsat
            })
        })
    }

    /// Every frame excludes bad states: `F_i & Bad` unsatisfiable.
    pub fn is_safe(&self, ts: &TransitionSystem) -> bool {
        (0..=self.size()).all(|i| {
            let mut s = Solver::new();
            let mut u = Unroller::new(ts);
            self.add_frame(&mut u, &mut s, i, 0, 0);
            u.add_bad(&mut s, 0, 0);
            s.solve(&[]) == SolveResult::Unsat
        })
    }

    /// `F_i => F_{i+1}` for `0 <= i < N`, checked semantically.
    pub fn is_monotone(&self, ts: &TransitionSystem) -> bool {
        (0..self.size()).all(|i| self.implies_frame(ts, i, i + 1))
    }

    /// `F_a => F_b`, one SAT call per clause of `F_b`.
    pub fn implies_frame(&self, ts: &TransitionSystem, a: usize, b: usize) -> bool {
        let mut s = Solver::new();
        let mut u = Unroller::new(ts);
        self.add_frame(&mut u, &mut s, a, 0, 0);
        let targets: Vec<Clause> = if b == 0 {
            self.init
                .lits()
                .iter()
                .map(|&l| Clause::new(vec![l]).unwrap())
                .collect()
        } else {
            self.frame_clauses(b)
        };
        targets.iter().all(|c| {
            let neg: Vec<Lit> = c
                .lits()
                .iter()
                .map(|&l| !u.state_lit(&mut s, l, 0))
                .collect();
            s.solve(&neg) == SolveResult::Unsat
        })
    }

    /// Least `i` in `1..=N` with `F_i => F_{i-1}`. For a monotone trace this
    /// is the closure condition and `F_i` is an inductive invariant.
    pub fn closed_at(&self, ts: &TransitionSystem) -> Option<usize> {
        (1..=self.size()).find(|&i| {
            if i >= 2 && self.deltas[i - 1].is_empty() {
                return true;
            }
            self.implies_frame(ts, i, i - 1)
        })
    }

    pub fn is_closed(&self, ts: &TransitionSystem) -> bool {
        self.closed_at(ts).is_some()
    }

    /// Largest `i` such that `Tr[F^i] & Bad(v_{N+1})` is unsatisfiable, or
    /// `None` when even `i = 0` is satisfiable.
    pub fn max_extension_level(&self, ts: &TransitionSystem) -> Option<usize> {
        (0..=self.size())
            .rev()
            .find(|&i| !self.characteristic_sat(ts, Sel::new(i, 1)))
    }

    /// `Tr[F^(i,k)] & Bad(v_{N+1})` is unsatisfiable.
    pub fn is_sel(&self, ts: &TransitionSystem, sel: Sel) -> Result<bool> {
        check_sel(sel, self.size())?;
        Ok(!self.characteristic_sat(ts, sel))
    }

    /// Satisfiability of the characteristic formula of `sel` with `Bad`.
    pub fn characteristic_sat(&self, ts: &TransitionSystem, sel: Sel) -> bool {
        let mut s = Solver::new();
        let mut u = Unroller::new(ts);
        encode_characteristic(self, &mut u, &mut s, sel, false).expect("valid level");
        s.solve(&[]) == SolveResult::Sat
    }

    /// Pushes clauses forward: a clause at level `i < N` moves to `i+1`
    /// whenever `F_i & Tr => c'`. One ascending sweep reaches the fixpoint.
    /// Returns the number of clauses moved.
    pub fn pdr_push(&mut self, ts: &TransitionSystem) -> usize {
        self.pdr_push_from(ts, 1)
    }

    /// [`pdr_push`](Self::pdr_push) restricted to clauses at levels
    /// `>= from`, which leaves the frames `F_1 .. F_from` unchanged.
    pub fn pdr_push_from(&mut self, ts: &TransitionSystem, from: usize) -> usize {
        let mut moved = 0;
        for i in from.max(1)..self.size() {
            if self.deltas[i].is_empty() {
                continue;
            }
            let mut s = Solver::new();
            let mut u = Unroller::new(ts);
            self.add_frame(&mut u, &mut s, i, 0, 0);
            u.add_transition(&mut s, 0, 0);
            let mut idx = 0;
            while idx < self.deltas[i].len() {
                let c = &self.deltas[i][idx];
                let neg: Vec<Lit> = c
                    .lits()
                    .iter()
                    .map(|&l| !u.state_lit(&mut s, l, 1))
                    .collect();
                if s.solve(&neg) == SolveResult::Unsat {
                    let c = c.clone();
                    if self.deltas[i + 1..]
                        .iter()
                        .flatten()
                        .any(|d| d.subsumes(&c))
                    {
                        self.deltas[i].swap_remove(idx);
                    } else {
                        self.promote(i, idx);
                    }
                    moved += 1;
                } else {
                    idx += 1;
                }
            }
        }
        moved
    }
}

pub(crate) fn check_sel(sel: Sel, n: usize) -> Result<()> {
    if sel.is_valid_for(n) {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "level {sel} violates 1 <= k <= i+1 <= N+1 with N = {n}"
        )))
    }
}

/// Encodes `Tr[F^(i,k)] & Bad(v_{N+1})`. With `grouped`, the transition
/// from frame `j` goes into group `j - (i+1-k)` and `Bad` into the last group,
/// matching the partition used for sequence interpolation.
pub fn encode_characteristic<S: ClauseSink>(
    trace: &InductiveTrace,
    u: &mut Unroller,
    sink: &mut S,
    sel: Sel,
    grouped: bool,
) -> Result<()> {
    let n = trace.size();
    check_sel(sel, n)?;
    let start = sel.i + 1 - sel.k;
    for j in start..=n {
        let level = if j <= sel.i { sel.i } else { j };
        let g = if grouped { (j - start) as u32 } else { 0 };
        for l in 0..u.ts().num_latches() {
            u.latch_var(sink, l, j);
        }
        trace.add_frame(u, sink, level, j, g);
        u.add_transition(sink, j, g);
    }
    let g = if grouped { (n + 1 - start) as u32 } else { 0 };
    u.add_bad(sink, n + 1, g);
    Ok(())
}
