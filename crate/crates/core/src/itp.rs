//! Sequence interpolants from resolution refutations.
//!
//! For each cut between consecutive groups, partial interpolants are
//! computed over the one refutation with the dual of McMillan's system:
//! clauses of the prefix contribute false, clauses of the suffix contribute
//! the conjunction of their negated shared literals, resolution on a
//! suffix-local pivot is a conjunction and any other pivot a disjunction.
//! The result is always checked against the interpolation conditions rather
//! than trusted.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::aiger::TransitionSystem;
use crate::cnf::{assert_enc, encode_formula_with, ClauseSink, CnfFormula, Enc, Unroller};
use crate::error::{Error, Result};
use crate::formula::{Edge, Formula};
use crate::sat::{Lit, ProofStep, ResolutionProof, SolveResult, Solver, Var};
use crate::state::LatchLit;
use crate::trace::{encode_characteristic, InductiveTrace, Sel};

/// A clause set split into ordered groups `A_0 .. A_{G-1}`, with the latch
/// variables at each cut.
#[derive(Clone, Debug)]
pub struct ItpPartition {
    pub cnf: CnfFormula,
    pub num_groups: usize,
    /// `boundaries[c][l]`: solver variable of latch `l` at the cut between
    /// group `c` and group `c + 1`.
    pub boundaries: Vec<Vec<Option<Var>>>,
}

impl ItpPartition {
    /// The partition of `Tr[F^(i,k)] & Bad(v_{N+1})` into one group per
    /// transition plus a final group for `Bad`.
    pub fn characteristic(
        ts: &TransitionSystem,
        trace: &InductiveTrace,
        sel: Sel,
    ) -> Result<ItpPartition> {
        let mut cnf = CnfFormula::default();
        let mut u = Unroller::new(ts);
        encode_characteristic(trace, &mut u, &mut cnf, sel, true)?;
        let start = sel.i + 1 - sel.k;
        let n = trace.size();
        let num_groups = n + 2 - start;
        let boundaries = (0..num_groups - 1)
            .map(|c| {
                (0..ts.num_latches())
                    .map(|l| u.lookup_latch(l, start + c + 1))
                    .collect()
            })
            .collect();
        Ok(ItpPartition {
            cnf,
            num_groups,
            boundaries,
        })
    }

    /// A partition from explicit groups of clauses over solver variables,
    /// where `boundaries[c]` names the variable playing latch `l` at cut `c`.
    pub fn from_groups(
        groups: Vec<Vec<Vec<Lit>>>,
        boundaries: Vec<Vec<Option<Var>>>,
    ) -> ItpPartition {
        let mut cnf = CnfFormula::default();
        let mut max_var = 0;
        for (g, cls) in groups.iter().enumerate() {
            for c in cls {
                for l in c {
                    max_var = max_var.max(l.var().0 + 1);
                }
                cnf.clauses.push((c.clone(), g as u32));
            }
        }
        for b in boundaries.iter().flatten().flatten() {
            max_var = max_var.max(b.0 + 1);
        }
        cnf.num_vars = max_var;
        ItpPartition {
            cnf,
            num_groups: groups.len(),
            boundaries,
        }
    }

    fn latch_of(&self, cut: usize) -> HashMap<Var, usize> {
        self.boundaries[cut]
            .iter()
            .enumerate()
            .filter_map(|(l, v)| v.map(|v| (v, l)))
            .collect()
    }
}

/// Interpolants `I_c` for cuts `c = 0 .. G-2`, over latch variables.
#[derive(Clone, Debug)]
pub struct SeqInterpolant {
    pub formula: Formula,
    pub itps: Vec<Edge>,
}

impl SeqInterpolant {
    pub fn len(&self) -> usize {
        self.itps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itps.is_empty()
    }

    /// Text dump of every interpolant with its cut index.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (c, &e) in self.itps.iter().enumerate() {
            writeln!(out, "cut {c}: latches {:?}", self.formula.support(e))?;
            self.formula.write_text(e, &mut out)?;
        }
        Ok(())
    }
}

/// Refutes the partition with a proof-recording solver and extracts the
/// sequence interpolant. `Ok(None)` when the clauses are satisfiable.
pub fn refute_and_interpolate(part: &ItpPartition) -> Result<Option<SeqInterpolant>> {
    let mut s = Solver::with_proof();
    part.cnf.load_into(&mut s);
    match s.solve(&[]) {
        SolveResult::Sat => Ok(None),
        SolveResult::Unknown => Err(Error::Contract("budget exhausted during refutation".into())),
        SolveResult::Unsat => {
            let proof = s
                .take_proof()
                .ok_or_else(|| Error::Contract("no refutation recorded".into()))?;
            seq_interpolant(&proof, part).map(Some)
        }
    }
}

/// Extracts one interpolant per cut from a refutation of `part`.
pub fn seq_interpolant(proof: &ResolutionProof, part: &ItpPartition) -> Result<SeqInterpolant> {
    let order = proof.reachable();
    // group span of every variable occurring in a leaf of the proof
    let mut span: HashMap<Var, (u32, u32)> = HashMap::new();
    for &id in &order {
        let node = proof.node(id);
        if let ProofStep::Input { group } = node.step {
            if group as usize >= part.num_groups {
                return Err(Error::Contract(format!(
                    "input clause {id} has unknown group {group}"
                )));
            }
            for l in &node.clause {
                let e = span.entry(l.var()).or_insert((group, group));
                e.0 = e.0.min(group);
                e.1 = e.1.max(group);
            }
        }
    }
    let mut formula = Formula::new();
    let mut itps = Vec::with_capacity(part.num_groups.saturating_sub(1));
    let mut partial: HashMap<u32, Edge> = HashMap::with_capacity(order.len());
    for cut in 0..part.num_groups.saturating_sub(1) {
        let c = cut as u32;
        let latch_of = part.latch_of(cut);
        partial.clear();
        for &id in &order {
            let node = proof.node(id);
            let e = match node.step {
                ProofStep::Input { group } if group <= c => Edge::FALSE,
                ProofStep::Input { .. } => {
                    let mut acc = Edge::TRUE;
                    for l in &node.clause {
                        let (lo, hi) = span[&l.var()];
                        if lo <= c && c < hi {
                            let latch = *latch_of.get(&l.var()).ok_or_else(|| {
                                Error::Contract(format!(
                                    "shared variable {} at cut {cut} is not a boundary latch",
                                    l.var().0
                                ))
                            })?;
                            let a = formula.atom(LatchLit::new(latch, !l.is_positive()));
                            acc = formula.and(acc, a);
                        }
                    }
                    acc
                }
                ProofStep::Resolvent { left, right, pivot } => {
                    let (a, b) = (partial[&left], partial[&right]);
                    let (lo, _) = span[&pivot];
                    if lo > c {
                        formula.and(a, b)
                    } else {
                        formula.or(a, b)
                    }
                }
            };
            partial.insert(id, e);
        }
        let root = proof
            .root
            .ok_or_else(|| Error::Contract("proof without root".into()))?;
        itps.push(partial[&root]);
    }
    Ok(SeqInterpolant { formula, itps })
}

/// Which interpolation condition failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItpViolation {
    /// `A_0 => I_0` fails.
    First,
    /// `I_{c-1} & A_c => I_c` fails at cut `c`.
    Step(usize),
    /// `I_last & A_last` is satisfiable.
    Last,
    /// `I_c` mentions a variable outside its boundary.
    Vocabulary(usize),
    /// Wrong number of interpolants.
    Arity,
}

fn encode_at<S: ClauseSink>(
    sink: &mut S,
    itp: &SeqInterpolant,
    cut: usize,
    boundary: &[Option<Var>],
) -> Enc {
    encode_formula_with(sink, &itp.formula, itp.itps[cut], 0, |_, l| {
        Lit::pos(boundary[l].expect("vocabulary checked"))
    })
}

/// Checks conditions (a)-(d): `A_0 => I_0`, `I_{c-1} & A_c => I_c`,
/// `I_last & A_last` unsatisfiable, and each `I_c` over its boundary only.
/// Every implication is certified by a fresh solver.
pub fn validate_seq_interpolant(
    itp: &SeqInterpolant,
    part: &ItpPartition,
) -> std::result::Result<(), ItpViolation> {
    let g = part.num_groups;
    if itp.len() + 1 != g {
        return Err(ItpViolation::Arity);
    }
    for c in 0..itp.len() {
        for l in itp.formula.support(itp.itps[c]) {
            if part.boundaries[c].get(l).copied().flatten().is_none() {
                return Err(ItpViolation::Vocabulary(c));
            }
        }
    }
    let group_clauses = |grp: usize| {
        part.cnf
            .clauses
            .iter()
            .filter(move |(_, gg)| *gg as usize == grp)
            .map(|(c, _)| c.clone())
    };
    for grp in 0..g {
        let mut s = Solver::new();
        while s.num_vars() < part.cnf.num_vars as usize {
            s.new_var();
        }
        for c in group_clauses(grp) {
            s.add_clause(&c);
        }
        if grp > 0 {
            let e = encode_at(&mut s, itp, grp - 1, &part.boundaries[grp - 1]);
            assert_enc(&mut s, e, 0);
        }
        if grp + 1 < g {
            let e = encode_at(&mut s, itp, grp, &part.boundaries[grp]);
            assert_enc(&mut s, !e, 0);
        }
        if s.solve(&[]) != SolveResult::Unsat {
            return Err(if grp == 0 {
                ItpViolation::First
            } else if grp + 1 == g {
                ItpViolation::Last
            } else {
                ItpViolation::Step(grp)
            });
        }
    }
    Ok(())
}

/// The specialized implications that hold for an interpolant of the
/// characteristic formula of `sel = (i, k)` over a trace of size `N`, with
/// `s = i + 1 - k`:
/// `F_i & Tr => I'_{s+1}`, `F_i & I_j & Tr => I'_{j+1}` for `s < j <= i`,
/// `F_j & I_j & Tr => I'_{j+1}` for `i < j <= N`, and `I_{N+1} & Bad`
/// unsatisfiable. Returns a description of the first failing row.
pub fn check_heart_shape(
    ts: &TransitionSystem,
    trace: &InductiveTrace,
    sel: Sel,
    itp: &SeqInterpolant,
) -> std::result::Result<(), String> {
    let n = trace.size();
    let s = sel.i + 1 - sel.k;
    if itp.len() != n + 1 - s {
        return Err(format!(
            "expected {} interpolants, got {}",
            n + 1 - s,
            itp.len()
        ));
    }
    // position of I_m in the sequence
    let pos = |m: usize| m - s - 1;
    let step = |level: usize, prev: Option<usize>, next: usize| {
        let mut sv = Solver::new();
        let mut u = Unroller::new(ts);
        trace.add_frame(&mut u, &mut sv, level, 0, 0);
        u.add_transition(&mut sv, 0, 0);
        if let Some(p) = prev {
            let e = u.encode_formula(&mut sv, &itp.formula, itp.itps[p], 0, 0);
            assert_enc(&mut sv, e, 0);
        }
        let e = u.encode_formula(&mut sv, &itp.formula, itp.itps[next], 1, 0);
        assert_enc(&mut sv, !e, 0);
        sv.solve(&[]) == SolveResult::Unsat
    };
    if !step(sel.i, None, pos(s + 1)) {
        return Err(format!("F_{} & Tr does not imply I_{}", sel.i, s + 1));
    }
    for j in s + 1..=n {
        let level = if j <= sel.i { sel.i } else { j };
        if !step(level, Some(pos(j)), pos(j + 1)) {
            return Err(format!("F_{level} & I_{j} & Tr does not imply I_{}", j + 1));
        }
    }
    let mut sv = Solver::new();
    let mut u = Unroller::new(ts);
    let e = u.encode_formula(&mut sv, &itp.formula, itp.itps[pos(n + 1)], 0, 0);
    assert_enc(&mut sv, e, 0);
    u.add_bad(&mut sv, 0, 0);
    if sv.solve(&[]) != SolveResult::Unsat {
        return Err(format!("I_{} admits a bad state", n + 1));
    }
    Ok(())
}
