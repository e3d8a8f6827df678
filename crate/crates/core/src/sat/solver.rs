//! Incremental CDCL with two watched literals, VSIDS, phase saving, Luby
//! restarts, activity-based learnt clause deletion and assumption cores.
//!
//! With proof recording enabled every learnt clause is justified by a chain
//! of binary resolutions, and literals fixed at decision level 0 are resolved
//! away against their own unit derivations, so an unsatisfiable run without
//! assumptions yields a refutation whose root is the empty clause.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lit::{Lit, Var};
use super::proof::{resolve, ProofId, ProofStep, ResolutionProof};

thread_local! {
    static SOLVE_CALLS: Cell<u64> = const { Cell::new(0) };
    static CONFLICTS: Cell<u64> = const { Cell::new(0) };
}

/// Number of `solve` calls made on this thread by any solver.
pub fn solve_calls() -> u64 {
    SOLVE_CALLS.with(|c| c.get())
}

/// Number of conflicts encountered on this thread by any solver.
pub fn total_conflicts() -> u64 {
    CONFLICTS.with(|c| c.get())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// Conflict budget exhausted before a verdict.
    Unknown,
}

#[derive(Clone, Debug, Default)]
pub struct SolverStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum Value {
    True,
    False,
    Undef,
}

type CRef = u32;
const NO_REASON: CRef = u32::MAX;
const NO_PROOF: ProofId = u32::MAX;

struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
    proof: ProofId,
}

#[derive(Copy, Clone)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, -1);
    }
    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }
    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }
    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c =
                if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                    r
                } else {
                    l
                };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }
    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as i32;
        self.up(i, act);
    }
    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            let i = self.pos[v as usize] as usize;
            self.up(i, act);
        }
    }
    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub struct Solver {
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<CRef>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    model: Vec<bool>,
    core: Vec<Lit>,
    budget: Option<u64>,
    proof: Option<ResolutionProof>,
    unit_proof: Vec<ProofId>,
    stats: SolverStats,
    rng: Option<ChaCha8Rng>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            num_learnts: 0,
            max_learnts: 2000.0,
            model: Vec::new(),
            core: Vec::new(),
            budget: None,
            proof: None,
            unit_proof: Vec::new(),
            stats: SolverStats::default(),
            rng: None,
        }
    }

    /// A solver that records a resolution proof of every clause it derives.
    pub fn with_proof() -> Solver {
        let mut s = Solver::new();
        s.proof = Some(ResolutionProof::default());
        s
    }

    /// Seeds the initial variable activities. Seed 0 leaves them all at zero.
    pub fn set_seed(&mut self, seed: u64) {
        self.rng = if seed == 0 {
            None
        } else {
            Some(ChaCha8Rng::seed_from_u64(seed))
        };
    }

    /// Per-call conflict limit; `None` means unlimited.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(Value::Undef);
        self.level.push(0);
        self.reason.push(NO_REASON);
        let act = match self.rng.as_mut() {
            Some(r) => r.gen::<f64>() * 1e-5,
            None => 0.0,
        };
        self.activity.push(act);
        self.phase.push(false);
        self.seen.push(false);
        self.unit_proof.push(NO_PROOF);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow(self.assigns.len());
        self.order.insert(v.0, &self.activity);
        v
    }

    fn ensure_var(&mut self, v: Var) {
        while self.num_vars() <= v.index() {
            self.new_var();
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> Value {
        match self.assigns[l.var().index()] {
            Value::Undef => Value::Undef,
            Value::True => {
                if l.is_negated() {
                    Value::False
                } else {
                    Value::True
                }
            }
            Value::False => {
                if l.is_negated() {
                    Value::True
                } else {
                    Value::False
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause in group 0.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        self.add_clause_in(lits, 0)
    }

    /// Adds a clause tagged with a partition group (recorded in the proof).
    /// Returns false once the clause database is known to be unsatisfiable.
    pub fn add_clause_in(&mut self, lits: &[Lit], group: u32) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let Some(clause) = super::lit::normalize_clause(lits) else {
            return true;
        };
        for l in &clause {
            self.ensure_var(l.var());
        }
        let proof_id = match self.proof.as_mut() {
            Some(p) => p.push(clause.clone(), ProofStep::Input { group }),
            None => NO_PROOF,
        };
        if clause.iter().any(|&l| self.value(l) == Value::True) {
            return true;
        }
        let mut lits = clause;
        // unassigned literals first
        lits.sort_by_key(|&l| (self.value(l) != Value::Undef) as u8);
        let free = lits
            .iter()
            .take_while(|&&l| self.value(l) == Value::Undef)
            .count();
        let cref = self.store(lits, false, proof_id);
        match free {
            0 => {
                self.derive_empty(cref);
                false
            }
            1 => {
                let l = self.clauses[cref as usize].lits[0];
                if self.clauses[cref as usize].lits.len() >= 2 {
                    self.attach(cref);
                }
                self.enqueue(l, cref);
                if let Some(confl) = self.propagate() {
                    self.derive_empty(confl);
                    return false;
                }
                true
            }
            _ => {
                self.attach(cref);
                true
            }
        }
    }

    fn store(&mut self, lits: Vec<Lit>, learnt: bool, proof: ProofId) -> CRef {
        let cref = self.clauses.len() as CRef;
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
            proof,
        });
        cref
    }

    fn attach(&mut self, cref: CRef) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[(!a).code()].push(Watcher { cref, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref, blocker: a });
    }

    fn enqueue(&mut self, l: Lit, reason: CRef) {
        let v = l.var().index();
        self.assigns[v] = if l.is_negated() {
            Value::False
        } else {
            Value::True
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.assigns[v] = Value::Undef;
            self.reason[v] = NO_REASON;
            self.phase[v] = l.is_positive();
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.qhead.min(lim);
    }

    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let false_lit = !p;
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                if self.clauses[cref as usize].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref as usize].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref as usize].lits[0];
                if first != w.blocker && self.value(first) == Value::True {
                    ws[j] = Watcher {
                        cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                // look for a new watch
                let len = self.clauses[cref as usize].lits.len();
                let mut found = false;
                for k in 2..len {
                    let lk = self.clauses[cref as usize].lits[k];
                    if self.value(lk) != Value::False {
                        self.clauses[cref as usize].lits.swap(1, k);
                        self.watches[(!lk).code()].push(Watcher {
                            cref,
                            blocker: first,
                        });
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = Watcher {
                    cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == Value::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        let i = v.index();
        self.activity[i] += self.var_inc;
        if self.activity[i] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v.0, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// Proof of the unit clause fixing `v` at level 0.
    fn unit_proof_of(&mut self, v: Var) -> ProofId {
        if self.unit_proof[v.index()] != NO_PROOF {
            return self.unit_proof[v.index()];
        }
        // iterative post-order over reasons of level-0 assignments
        let mut stack = vec![(v, false)];
        while let Some((x, expanded)) = stack.pop() {
            if self.unit_proof[x.index()] != NO_PROOF {
                continue;
            }
            let cref = self.reason[x.index()];
            debug_assert!(cref != NO_REASON, "level-0 variable without reason");
            let others: Vec<Var> = self.clauses[cref as usize]
                .lits
                .iter()
                .map(|l| l.var())
                .filter(|&u| u != x)
                .collect();
            if !expanded {
                stack.push((x, true));
                for u in others {
                    if self.unit_proof[u.index()] == NO_PROOF {
                        stack.push((u, false));
                    }
                }
                continue;
            }
            let mut id = self.clauses[cref as usize].proof;
            for u in others {
                id = self.resolve_step(id, self.unit_proof[u.index()], u);
            }
            self.unit_proof[x.index()] = id;
        }
        self.unit_proof[v.index()]
    }

    fn resolve_step(&mut self, left: ProofId, right: ProofId, pivot: Var) -> ProofId {
        let p = self.proof.as_mut().expect("proof recording");
        let clause = resolve(&p.node(left).clause, &p.node(right).clause, pivot)
            .expect("recorded resolution must clash on the pivot");
        p.push(clause, ProofStep::Resolvent { left, right, pivot })
    }

    /// Conflict at level 0: records the refutation and marks the solver unsat.
    fn derive_empty(&mut self, confl: CRef) {
        self.ok = false;
        if self.proof.is_none() {
            return;
        }
        let mut id = self.clauses[confl as usize].proof;
        let vars: Vec<Var> = self.clauses[confl as usize]
            .lits
            .iter()
            .map(|l| l.var())
            .collect();
        for v in vars {
            let u = self.unit_proof_of(v);
            id = self.resolve_step(id, u, v);
        }
        self.proof.as_mut().unwrap().root = Some(id);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first), the backjump level and its proof id.
    fn analyze(&mut self, confl: CRef) -> (Vec<Lit>, u32, ProofId) {
        let logging = self.proof.is_some();
        let mut learnt = vec![Lit::from_code(0)];
        let mut path_c = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut confl = confl;
        let mut proof_id = self.clauses[confl as usize].proof;
        let mut zero_vars: Vec<Var> = Vec::new();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = q.var();
                if self.seen[v.index()] {
                    continue;
                }
                if self.level[v.index()] == 0 {
                    if logging {
                        self.seen[v.index()] = true;
                        zero_vars.push(v);
                    }
                    continue;
                }
                self.seen[v.index()] = true;
                self.bump_var(v);
                if self.level[v.index()] >= self.decision_level() {
                    path_c += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[pl.var().index()] = false;
            path_c -= 1;
            if path_c == 0 {
                break;
            }
            confl = self.reason[pl.var().index()];
            if logging {
                let rp = self.clauses[confl as usize].proof;
                proof_id = self.resolve_step(proof_id, rp, pl.var());
            }
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        if logging {
            for v in zero_vars {
                self.seen[v.index()] = false;
                let u = self.unit_proof_of(v);
                proof_id = self.resolve_step(proof_id, u, v);
            }
        }
        // backjump level: highest level among the rest, moved to position 1
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var().index()];
        }
        if !logging {
            proof_id = NO_PROOF;
        }
        (learnt, bt, proof_id)
    }

    /// Assumptions responsible for the falsified assumption `p`.
    fn analyze_final(&mut self, p: Lit) {
        self.core.clear();
        self.core.push(!p);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[p.var().index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i].var();
            if !self.seen[x.index()] {
                continue;
            }
            let r = self.reason[x.index()];
            if r == NO_REASON {
                if self.level[x.index()] > 0 {
                    self.core.push(self.trail[i]);
                }
            } else {
                for k in 1..self.clauses[r as usize].lits.len() {
                    let u = self.clauses[r as usize].lits[k].var();
                    if self.level[u.index()] > 0 {
                        self.seen[u.index()] = true;
                    }
                }
            }
            self.seen[x.index()] = false;
        }
        self.seen[p.var().index()] = false;
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<CRef> = (0..self.clauses.len() as CRef)
            .filter(|&c| {
                let cd = &self.clauses[c as usize];
                cd.learnt && !cd.deleted && cd.lits.len() > 2
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .partial_cmp(&self.clauses[b as usize].activity)
                .unwrap()
        });
        let half = learnts.len() / 2;
        for &c in &learnts[..half] {
            let first = self.clauses[c as usize].lits[0];
            let locked = self.value(first) == Value::True && self.reason[first.var().index()] == c;
            if !locked {
                let cd = &mut self.clauses[c as usize];
                cd.deleted = true;
                cd.lits = Vec::new();
                self.num_learnts -= 1;
            }
        }
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == Value::Undef {
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    /// Solves under `assumptions`. After `Sat` the model is available through
    /// [`Solver::model_value`]; after `Unsat` the failed assumptions through
    /// [`Solver::core`] and, when recording and the refutation does not depend
    /// on assumptions, the proof through [`Solver::proof`].
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.stats.solves += 1;
        SOLVE_CALLS.with(|c| c.set(c.get() + 1));
        let conflicts_before = self.stats.conflicts;
        self.core.clear();
        self.model.clear();
        if !self.ok {
            return SolveResult::Unsat;
        }
        for a in assumptions {
            self.ensure_var(a.var());
        }
        self.cancel_until(0);
        if let Some(confl) = self.propagate() {
            self.derive_empty(confl);
            return SolveResult::Unsat;
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart_no = 0u64;
        let result = loop {
            let limit = (luby(2.0, restart_no) * 100.0) as u64;
            match self.search(limit, assumptions, start_conflicts) {
                Some(r) => break r,
                None => {
                    restart_no += 1;
                    self.stats.restarts += 1;
                }
            }
        };
        let spent = self.stats.conflicts - conflicts_before;
        CONFLICTS.with(|c| c.set(c.get() + spent));
        if result == SolveResult::Sat {
            self.model = self.assigns.iter().map(|&v| v == Value::True).collect();
        }
        self.cancel_until(0);
        result
    }

    fn search(&mut self, limit: u64, assumptions: &[Lit], start: u64) -> Option<SolveResult> {
        let mut local_conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local_conflicts += 1;
                if self.decision_level() == 0 {
                    self.derive_empty(confl);
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt, pid) = self.analyze(confl);
                self.cancel_until(bt);
                let asserting = learnt[0];
                let cref = self.store(learnt, true, pid);
                if self.clauses[cref as usize].lits.len() >= 2 {
                    self.attach(cref);
                    self.num_learnts += 1;
                }
                self.enqueue(asserting, cref);
                self.var_inc *= 1.0 / 0.95;
                self.cla_inc *= 1.0 / 0.999;
            } else {
                if let Some(b) = self.budget {
                    if self.stats.conflicts - start >= b {
                        return Some(SolveResult::Unknown);
                    }
                }
                if local_conflicts >= limit {
                    self.cancel_until(0);
                    return None;
                }
                if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        Value::True => self.trail_lim.push(self.trail.len()),
                        Value::False => {
                            self.analyze_final(!a);
                            return Some(SolveResult::Unsat);
                        }
                        Value::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => {
                            self.stats.decisions += 1;
                            l
                        }
                        None => return Some(SolveResult::Sat),
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    /// Value of `l` in the last model. Variables created after the last
    /// satisfiable call read as false.
    pub fn model_value(&self, l: Lit) -> bool {
        let v = self.model.get(l.var().index()).copied().unwrap_or(false);
        v != l.is_negated()
    }

    pub fn has_model(&self) -> bool {
        !self.model.is_empty()
    }

    /// Subset of the assumptions that is sufficient for the last `Unsat`.
    pub fn core(&self) -> &[Lit] {
        &self.core
    }

    /// The recorded refutation, present when proof recording is on and the
    /// clause database itself is unsatisfiable.
    pub fn proof(&self) -> Option<&ResolutionProof> {
        self.proof.as_ref().filter(|p| p.root.is_some())
    }

    pub fn take_proof(&mut self) -> Option<ResolutionProof> {
        if self.proof.as_ref().is_some_and(|p| p.root.is_some()) {
            self.proof.take()
        } else {
            None
        }
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }
}
