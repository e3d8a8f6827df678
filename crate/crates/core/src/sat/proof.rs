//! Resolution proofs recorded by the solver and an independent checker.
//!
//! Every node stores its clause. Input nodes carry the partition (group) tag
//! they were added with; resolvents are binary, one pivot each.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use super::lit::{normalize_clause, Lit, Var};

pub type ProofId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStep {
    Input {
        group: u32,
    },
    Resolvent {
        left: ProofId,
        right: ProofId,
        pivot: Var,
    },
}

#[derive(Clone, Debug)]
pub struct ProofNode {
    /// Sorted, duplicate free.
    pub clause: Vec<Lit>,
    pub step: ProofStep,
}

#[derive(Clone, Debug, Default)]
pub struct ResolutionProof {
    pub nodes: Vec<ProofNode>,
    pub root: Option<ProofId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProofDefect {
    #[error("proof has no root")]
    NoRoot,
    #[error("root clause {0} is not empty")]
    NonEmptyRoot(ProofId),
    #[error("node {node} references antecedent {antecedent} which is not earlier in the proof")]
    BadReference { node: ProofId, antecedent: ProofId },
    #[error("node {node}: pivot {pivot:?} does not clash between antecedents")]
    BadPivot { node: ProofId, pivot: Var },
    #[error("node {node}: stored clause differs from the resolvent of its antecedents")]
    WrongResolvent { node: ProofId },
    #[error("node {node}: input clause not present in group {group}")]
    UnknownInput { node: ProofId, group: u32 },
}

/// Binary resolution of two sorted clauses on `pivot`. Returns `None` when the
/// pivot does not occur with opposite signs in the two clauses.
pub fn resolve(a: &[Lit], b: &[Lit], pivot: Var) -> Option<Vec<Lit>> {
    let pa = a.iter().find(|l| l.var() == pivot)?;
    let pb = b.iter().find(|l| l.var() == pivot)?;
    if *pa != !*pb {
        return None;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            let l = a[i];
            i += 1;
            if j < b.len() && b[j] == l {
                j += 1;
            }
            l
        } else {
            let l = b[j];
            j += 1;
            l
        };
        if next.var() != pivot {
            out.push(next);
        }
    }
    Some(out)
}

impl ResolutionProof {
    pub fn node(&self, id: ProofId) -> &ProofNode {
        &self.nodes[id as usize]
    }

    pub(crate) fn push(&mut self, clause: Vec<Lit>, step: ProofStep) -> ProofId {
        let id = self.nodes.len() as ProofId;
        self.nodes.push(ProofNode { clause, step });
        id
    }

    /// Ids of all nodes reachable from the root, in increasing (topological) order.
    pub fn reachable(&self) -> Vec<ProofId> {
        let Some(root) = self.root else {
            return Vec::new();
        };
        let mut mark = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        mark[root as usize] = true;
        while let Some(id) = stack.pop() {
            if let ProofStep::Resolvent { left, right, .. } = self.node(id).step {
                for a in [left, right] {
                    if !mark[a as usize] {
                        mark[a as usize] = true;
                        stack.push(a);
                    }
                }
            }
        }
        (0..self.nodes.len() as ProofId)
            .filter(|&i| mark[i as usize])
            .collect()
    }

    /// Line-oriented trace: `id lits 0 antecedents 0`, one node per line.
    /// Input lines have no antecedents and carry the group as a comment.
    pub fn write_trace<W: Write>(&self, mut out: W) -> io::Result<()> {
        for id in self.reachable() {
            let node = self.node(id);
            write!(out, "{}", id + 1)?;
            for l in &node.clause {
                write!(out, " {}", l.to_dimacs())?;
            }
            write!(out, " 0")?;
            match node.step {
                ProofStep::Input { group } => writeln!(out, " 0 c group {group}")?,
                ProofStep::Resolvent { left, right, pivot } => {
                    writeln!(out, " {} {} 0 c pivot {}", left + 1, right + 1, pivot.0 + 1)?
                }
            }
        }
        Ok(())
    }
}

/// Checks every node reachable from the root against `inputs` (clauses tagged
/// with their group) and verifies that the root is the empty clause.
pub fn validate_proof(
    proof: &ResolutionProof,
    inputs: &[(Vec<Lit>, u32)],
) -> Result<(), ProofDefect> {
    let root = proof.root.ok_or(ProofDefect::NoRoot)?;
    let mut known: HashMap<(Vec<Lit>, u32), ()> = HashMap::new();
    for (c, g) in inputs {
        if let Some(n) = normalize_clause(c) {
            known.insert((n, *g), ());
        }
    }
    for id in proof.reachable() {
        let node = proof.node(id);
        match node.step {
            ProofStep::Input { group } => {
                if !known.contains_key(&(node.clause.clone(), group)) {
                    return Err(ProofDefect::UnknownInput { node: id, group });
                }
            }
            ProofStep::Resolvent { left, right, pivot } => {
                for a in [left, right] {
                    if a >= id {
                        return Err(ProofDefect::BadReference {
                            node: id,
                            antecedent: a,
                        });
                    }
                }
                let r = resolve(&proof.node(left).clause, &proof.node(right).clause, pivot)
                    .ok_or(ProofDefect::BadPivot { node: id, pivot })?;
                if r != node.clause {
                    return Err(ProofDefect::WrongResolvent { node: id });
                }
            }
        }
    }
    if !proof.node(root).clause.is_empty() {
        return Err(ProofDefect::NonEmptyRoot(root));
    }
    Ok(())
}
