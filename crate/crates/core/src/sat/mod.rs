//! SAT solving: literals, a proof-producing CDCL solver and a proof checker.

mod lit;
mod proof;
mod solver;

pub use lit::{normalize_clause, Lit, Var};
pub use proof::{
    resolve, validate_proof, ProofDefect, ProofId, ProofNode, ProofStep, ResolutionProof,
};
pub use solver::{solve_calls, total_conflicts, SolveResult, Solver, SolverStats};
