//! CNF encodings of time-frame unrollings.
//!
//! An [`Unroller`] maps (model variable, frame) pairs to solver variables and
//! emits Tseitin clauses for gate cones on demand. Gate auxiliaries belong to
//! one frame, so every variable shared between consecutive transition groups
//! is a latch variable of the frame between them.

use std::collections::HashMap;
use std::io::{self, Write};
use std::ops::Not;

use crate::aiger::{AigLit, TransitionSystem, VarKind};
use crate::formula::{Edge, Formula, Node};
use crate::sat::{Lit, Solver, Var};
use crate::state::{Clause, Cube, LatchLit};

/// Anything clauses can be written into.
pub trait ClauseSink {
    fn new_var(&mut self) -> Var;
    fn add_clause_in(&mut self, lits: &[Lit], group: u32);
}

impl ClauseSink for Solver {
    fn new_var(&mut self) -> Var {
        Solver::new_var(self)
    }
    fn add_clause_in(&mut self, lits: &[Lit], group: u32) {
        Solver::add_clause_in(self, lits, group);
    }
}

/// A clause list with group tags, usable as a sink and replayable into a
/// solver.
#[derive(Clone, Debug, Default)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<(Vec<Lit>, u32)>,
    pub assumptions: Vec<Lit>,
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars - 1)
    }
    fn add_clause_in(&mut self, lits: &[Lit], group: u32) {
        self.clauses.push((lits.to_vec(), group));
    }
}

impl CnfFormula {
    pub fn load_into(&self, solver: &mut Solver) {
        while solver.num_vars() < self.num_vars as usize {
            solver.new_var();
        }
        for (c, g) in &self.clauses {
            solver.add_clause_in(c, *g);
        }
    }

    pub fn is_sat(&self) -> bool {
        let mut s = Solver::new();
        self.load_into(&mut s);
        s.solve(&self.assumptions) == crate::sat::SolveResult::Sat
    }

    /// DIMACS with a comment legend naming the model variable behind each
    /// solver variable.
    pub fn write_dimacs<W: Write>(
        &self,
        legend: &[(Var, ModelVar, usize)],
        mut out: W,
    ) -> io::Result<()> {
        for (v, mv, t) in legend {
            writeln!(out, "c {} = {} @ {}", v.0 + 1, mv, t)?;
        }
        writeln!(
            out,
            "p cnf {} {}",
            self.num_vars,
            self.clauses.len() + self.assumptions.len()
        )?;
        for (c, _) in &self.clauses {
            for l in c {
                write!(out, "{} ", l.to_dimacs())?;
            }
            writeln!(out, "0")?;
        }
        for a in &self.assumptions {
            writeln!(out, "{} 0", a.to_dimacs())?;
        }
        Ok(())
    }
}

/// An encoded signal: either a constant or a solver literal.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Enc {
    Const(bool),
    Lit(Lit),
}

impl Not for Enc {
    type Output = Enc;
    fn not(self) -> Enc {
        match self {
            Enc::Const(b) => Enc::Const(!b),
            Enc::Lit(l) => Enc::Lit(!l),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelVar {
    Input(usize),
    Latch(usize),
    Gate(usize),
}

impl std::fmt::Display for ModelVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelVar::Input(i) => write!(f, "input {i}"),
            ModelVar::Latch(l) => write!(f, "latch {l}"),
            ModelVar::Gate(g) => write!(f, "gate {g}"),
        }
    }
}

#[derive(Default, Clone)]
struct FrameVars {
    latches: Vec<Option<Var>>,
    inputs: Vec<Option<Var>>,
    gates: Vec<Option<Enc>>,
}

/// Time-frame variable map for one transition system.
#[derive(Clone)]
pub struct Unroller<'a> {
    ts: &'a TransitionSystem,
    frames: Vec<FrameVars>,
    reverse: HashMap<Var, (ModelVar, usize)>,
}

/// Encodes `out <-> a & b` into `sink`, folding constants.
pub fn encode_and<S: ClauseSink>(sink: &mut S, a: Enc, b: Enc, group: u32) -> Enc {
    match (a, b) {
        (Enc::Const(false), _) | (_, Enc::Const(false)) => Enc::Const(false),
        (Enc::Const(true), x) | (x, Enc::Const(true)) => x,
        (Enc::Lit(x), Enc::Lit(y)) => {
            if x == y {
                return a;
            }
            if x == !y {
                return Enc::Const(false);
            }
            let o = Lit::pos(sink.new_var());
            sink.add_clause_in(&[!o, x], group);
            sink.add_clause_in(&[!o, y], group);
            sink.add_clause_in(&[o, !x, !y], group);
            Enc::Lit(o)
        }
    }
}

/// Asserts `enc` as a unit (an empty clause when it is constant false).
pub fn assert_enc<S: ClauseSink>(sink: &mut S, enc: Enc, group: u32) {
    match enc {
        Enc::Const(true) => {}
        Enc::Const(false) => sink.add_clause_in(&[], group),
        Enc::Lit(l) => sink.add_clause_in(&[l], group),
    }
}

/// Asserts `a <-> b`.
pub fn assert_equal<S: ClauseSink>(sink: &mut S, a: Lit, b: Enc, group: u32) {
    match b {
        Enc::Const(v) => sink.add_clause_in(&[if v { a } else { !a }], group),
        Enc::Lit(b) => {
            sink.add_clause_in(&[!a, b], group);
            sink.add_clause_in(&[a, !b], group);
        }
    }
}

impl<'a> Unroller<'a> {
    pub fn new(ts: &'a TransitionSystem) -> Unroller<'a> {
        Unroller {
            ts,
            frames: Vec::new(),
            reverse: HashMap::new(),
        }
    }

    pub fn ts(&self) -> &'a TransitionSystem {
        self.ts
    }

    fn frame(&mut self, t: usize) -> &mut FrameVars {
        while self.frames.len() <= t {
            self.frames.push(FrameVars {
                latches: vec![None; self.ts.num_latches()],
                inputs: vec![None; self.ts.num_inputs()],
                gates: vec![None; self.ts.num_ands()],
            });
        }
        &mut self.frames[t]
    }

    pub fn latch_var<S: ClauseSink>(&mut self, sink: &mut S, l: usize, t: usize) -> Var {
        if let Some(v) = self.frame(t).latches[l] {
            return v;
        }
        let v = sink.new_var();
        self.frame(t).latches[l] = Some(v);
        self.reverse.insert(v, (ModelVar::Latch(l), t));
        v
    }

    pub fn input_var<S: ClauseSink>(&mut self, sink: &mut S, i: usize, t: usize) -> Var {
        if let Some(v) = self.frame(t).inputs[i] {
            return v;
        }
        let v = sink.new_var();
        self.frame(t).inputs[i] = Some(v);
        self.reverse.insert(v, (ModelVar::Input(i), t));
        v
    }

    /// Already allocated variable for an input, if any.
    pub fn lookup_input(&self, i: usize, t: usize) -> Option<Var> {
        self.frames.get(t).and_then(|f| f.inputs[i])
    }

    pub fn lookup_latch(&self, l: usize, t: usize) -> Option<Var> {
        self.frames.get(t).and_then(|f| f.latches[l])
    }

    pub fn state_lit<S: ClauseSink>(&mut self, sink: &mut S, l: LatchLit, t: usize) -> Lit {
        Lit::new(self.latch_var(sink, l.latch(), t), l.is_positive())
    }

    /// Model variable and frame behind a solver variable created here.
    pub fn model_var(&self, v: Var) -> Option<(ModelVar, usize)> {
        self.reverse.get(&v).copied()
    }

    /// All (solver variable, model variable, frame) triples, sorted by variable.
    pub fn legend(&self) -> Vec<(Var, ModelVar, usize)> {
        let mut v: Vec<_> = self.reverse.iter().map(|(&v, &(m, t))| (v, m, t)).collect();
        v.sort_by_key(|e| e.0);
        v
    }

    /// Encodes the cone of `lit` in frame `t`.
    pub fn encode<S: ClauseSink>(
        &mut self,
        sink: &mut S,
        lit: AigLit,
        t: usize,
        group: u32,
    ) -> Enc {
        let base = self.encode_var(sink, lit.var(), t, group);
        if lit.is_negated() {
            !base
        } else {
            base
        }
    }

    fn encode_var<S: ClauseSink>(&mut self, sink: &mut S, var: u32, t: usize, group: u32) -> Enc {
        let ts = self.ts;
        match ts.var_kind(var) {
            VarKind::Const => return Enc::Const(false),
            VarKind::Input(i) => return Enc::Lit(Lit::pos(self.input_var(sink, i, t))),
            VarKind::Latch(l) => return Enc::Lit(Lit::pos(self.latch_var(sink, l, t))),
            VarKind::And(_) => {}
        }
        let mut stack = vec![var];
        while let Some(&v) = stack.last() {
            let VarKind::And(g) = ts.var_kind(v) else {
                stack.pop();
                continue;
            };
            if self.frame(t).gates[g].is_some() {
                stack.pop();
                continue;
            }
            let (a, b) = ts.ands()[g];
            let mut ready = true;
            for x in [a, b] {
                if let VarKind::And(h) = ts.var_kind(x.var()) {
                    if self.frame(t).gates[h].is_none() {
                        stack.push(x.var());
                        ready = false;
                    }
                }
            }
            if !ready {
                continue;
            }
            stack.pop();
            let ea = self.encode_leaf(sink, a, t);
            let eb = self.encode_leaf(sink, b, t);
            let e = encode_and(sink, ea, eb, group);
            if let Enc::Lit(l) = e {
                self.reverse
                    .entry(l.var())
                    .or_insert((ModelVar::Gate(g), t));
            }
            self.frame(t).gates[g] = Some(e);
        }
        let VarKind::And(g) = ts.var_kind(var) else {
            unreachable!()
        };
        self.frames[t].gates[g].unwrap()
    }

    /// Encoding of a gate operand whose own gate (if any) is already encoded.
    fn encode_leaf<S: ClauseSink>(&mut self, sink: &mut S, lit: AigLit, t: usize) -> Enc {
        let base = match self.ts.var_kind(lit.var()) {
            VarKind::Const => Enc::Const(false),
            VarKind::Input(i) => Enc::Lit(Lit::pos(self.input_var(sink, i, t))),
            VarKind::Latch(l) => Enc::Lit(Lit::pos(self.latch_var(sink, l, t))),
            VarKind::And(g) => self.frames[t].gates[g].expect("operand encoded first"),
        };
        if lit.is_negated() {
            !base
        } else {
            base
        }
    }

    /// `Tr(v_t, v_{t+1})`: each latch of frame t+1 equals its next-state
    /// function evaluated in frame t.
    pub fn add_transition<S: ClauseSink>(&mut self, sink: &mut S, t: usize, group: u32) {
        for l in 0..self.ts.num_latches() {
            let next = self.ts.latches()[l].next;
            let e = self.encode(sink, next, t, group);
            let v = self.latch_var(sink, l, t + 1);
            assert_equal(sink, Lit::pos(v), e, group);
        }
    }

    pub fn encode_bad<S: ClauseSink>(&mut self, sink: &mut S, t: usize, group: u32) -> Enc {
        self.encode(sink, self.ts.bad(), t, group)
    }

    /// Asserts `Bad(v_t)`.
    pub fn add_bad<S: ClauseSink>(&mut self, sink: &mut S, t: usize, group: u32) {
        let e = self.encode_bad(sink, t, group);
        assert_enc(sink, e, group);
    }

    /// Asserts `Init(v_t)`.
    pub fn add_init<S: ClauseSink>(&mut self, sink: &mut S, t: usize, group: u32) {
        let init = self.ts.initial_cube();
        self.add_cube(sink, &init, t, group);
    }

    pub fn add_cube<S: ClauseSink>(&mut self, sink: &mut S, cube: &Cube, t: usize, group: u32) {
        for &l in cube.lits() {
            let x = self.state_lit(sink, l, t);
            sink.add_clause_in(&[x], group);
        }
    }

    pub fn add_clause<S: ClauseSink>(&mut self, sink: &mut S, c: &Clause, t: usize, group: u32) {
        let lits: Vec<Lit> = c
            .lits()
            .iter()
            .map(|&l| self.state_lit(sink, l, t))
            .collect();
        sink.add_clause_in(&lits, group);
    }

    /// Adds `c` guarded by `act`: the clause `!act | c`.
    pub fn add_clause_guarded<S: ClauseSink>(
        &mut self,
        sink: &mut S,
        c: &Clause,
        t: usize,
        act: Lit,
        group: u32,
    ) {
        let mut lits: Vec<Lit> = c
            .lits()
            .iter()
            .map(|&l| self.state_lit(sink, l, t))
            .collect();
        lits.push(!act);
        sink.add_clause_in(&lits, group);
    }

    pub fn add_clauses<'c, S: ClauseSink, I: IntoIterator<Item = &'c Clause>>(
        &mut self,
        sink: &mut S,
        clauses: I,
        t: usize,
        group: u32,
    ) {
        for c in clauses {
            self.add_clause(sink, c, t, group);
        }
    }

    /// Tseitin encoding of a latch formula over frame `t`.
    pub fn encode_formula<S: ClauseSink>(
        &mut self,
        sink: &mut S,
        f: &Formula,
        root: Edge,
        t: usize,
        group: u32,
    ) -> Enc {
        encode_formula_with(sink, f, root, group, |sink, l| {
            Lit::pos(self.latch_var(sink, l, t))
        })
    }

    /// Reads the latch values of frame `t` from a satisfying assignment.
    pub fn read_state(&self, solver: &Solver, t: usize) -> Vec<bool> {
        (0..self.ts.num_latches())
            .map(|l| match self.lookup_latch(l, t) {
                Some(v) => solver.model_value(Lit::pos(v)),
                None => false,
            })
            .collect()
    }

    /// Reads the input values of frame `t`; unconstrained inputs read as 0.
    pub fn read_inputs(&self, solver: &Solver, t: usize) -> Vec<bool> {
        (0..self.ts.num_inputs())
            .map(|i| match self.lookup_input(i, t) {
                Some(v) => solver.model_value(Lit::pos(v)),
                None => false,
            })
            .collect()
    }
}

/// Tseitin encoding of a latch formula, with `atom` supplying the solver
/// literal of each latch.
pub fn encode_formula_with<S, F>(
    sink: &mut S,
    f: &Formula,
    root: Edge,
    group: u32,
    mut atom: F,
) -> Enc
where
    S: ClauseSink,
    F: FnMut(&mut S, usize) -> Lit,
{
    let mut val: HashMap<usize, Enc> = HashMap::new();
    let get = |val: &HashMap<usize, Enc>, e: Edge| {
        let b = val[&e.node()];
        if e.is_complemented() {
            !b
        } else {
            b
        }
    };
    for id in f.cone(root) {
        let e = match f.node_by_id(id) {
            Node::False => Enc::Const(false),
            Node::Atom(l) => Enc::Lit(atom(sink, l)),
            Node::And(a, b) => {
                let ea = get(&val, a);
                let eb = get(&val, b);
                encode_and(sink, ea, eb, group)
            }
        };
        val.insert(id, e);
    }
    get(&val, root)
}

/// CNF of `Tr(v_t, v_{t+1})` in a fresh formula.
pub fn encode_tr(ts: &TransitionSystem, t: usize) -> (CnfFormula, Vec<(Var, ModelVar, usize)>) {
    let mut cnf = CnfFormula::default();
    let mut u = Unroller::new(ts);
    for l in 0..ts.num_latches() {
        u.latch_var(&mut cnf, l, t);
    }
    u.add_transition(&mut cnf, t, 0);
    let legend = u.legend();
    (cnf, legend)
}

/// `Tr[phi]_M^N`: `phi_j(v_j) & Tr(v_j, v_{j+1})` for `M <= j < N`.
/// `frames(j)` supplies the clauses of `phi_j`. `M == N` gives the empty
/// formula (latch variables of frame M are still reserved).
pub fn unroll<F>(
    ts: &TransitionSystem,
    frames: F,
    m: usize,
    n: usize,
) -> (CnfFormula, Vec<(Var, ModelVar, usize)>)
where
    F: Fn(usize) -> Vec<Clause>,
{
    assert!(m <= n, "unrolling bounds out of order");
    let mut cnf = CnfFormula::default();
    let mut u = Unroller::new(ts);
    for l in 0..ts.num_latches() {
        u.latch_var(&mut cnf, l, m);
    }
    for j in m..n {
        let clauses = frames(j);
        u.add_clauses(&mut cnf, &clauses, j, 0);
        u.add_transition(&mut cnf, j, 0);
    }
    let legend = u.legend();
    (cnf, legend)
}
