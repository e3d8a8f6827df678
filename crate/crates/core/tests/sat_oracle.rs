//! Solver verdicts, models, cores and proofs against exhaustive enumeration.

use kavy::sat::{validate_proof, Lit, SolveResult, Solver, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cnf(rng: &mut ChaCha8Rng, vars: u32, clauses: usize) -> Vec<Vec<Lit>> {
    (0..clauses)
        .map(|_| {
            (0..3)
                .map(|_| Lit::new(Var(rng.gen_range(0..vars)), rng.gen()))
                .collect()
        })
        .collect()
}

fn brute_force_sat(cnf: &[Vec<Lit>], vars: u32, fixed: &[Lit]) -> bool {
    (0u32..1 << vars).any(|m| {
        let val = |l: &Lit| ((m >> l.var().0) & 1 == 1) == l.is_positive();
        fixed.iter().all(val) && cnf.iter().all(|c| c.iter().any(val))
    })
}

#[test]
fn verdicts_match_truth_table_on_random_3cnf() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let cnf = random_cnf(&mut rng, 8, 34);
        let mut s = Solver::new();
        for c in &cnf {
            s.add_clause(c);
        }
        let expected = brute_force_sat(&cnf, 8, &[]);
        let got = s.solve(&[]);
        assert_eq!(got == SolveResult::Sat, expected);
        if got == SolveResult::Sat {
            assert!(cnf.iter().all(|c| c.iter().any(|&l| s.model_value(l))));
        }
    }
}

#[test]
fn refutations_of_random_unsat_formulas_validate() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let cnf = random_cnf(&mut rng, 10, 60);
        if brute_force_sat(&cnf, 10, &[]) {
            continue;
        }
        let mut s = Solver::with_proof();
        let mut inputs = Vec::new();
        for (i, c) in cnf.iter().enumerate() {
            let g = (i % 3) as u32;
            s.add_clause_in(c, g);
            inputs.push((c.clone(), g));
        }
        assert_eq!(s.solve(&[]), SolveResult::Unsat);
        validate_proof(s.proof().expect("proof"), &inputs).unwrap();
        checked += 1;
    }
}

#[test]
fn cores_are_unsat_subsets_of_assumptions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut unsat_seen = 0;
    for _ in 0..300 {
        let cnf = random_cnf(&mut rng, 10, 30);
        let mut s = Solver::new();
        for c in &cnf {
            s.add_clause(c);
        }
        let assumptions: Vec<Lit> = (0..5).map(|i| Lit::new(Var(i * 2), rng.gen())).collect();
        let expected = brute_force_sat(&cnf, 10, &assumptions);
        let got = s.solve(&assumptions);
        assert_eq!(got == SolveResult::Sat, expected);
        if got == SolveResult::Unsat {
            unsat_seen += 1;
            let core = s.core().to_vec();
            assert!(
                core.iter().all(|l| assumptions.contains(l)),
                "{core:?} {assumptions:?}"
            );
            assert!(!brute_force_sat(&cnf, 10, &core));
        }
    }
    assert!(unsat_seen > 10);
}

#[test]
fn incremental_calls_keep_learnt_clauses_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = Solver::with_proof();
    let mut cnf = Vec::new();
    for round in 0..40 {
        let c = random_cnf(&mut rng, 9, 1).pop().unwrap();
        s.add_clause(&c);
        cnf.push(c);
        let a = [Lit::new(Var(round % 9), round % 2 == 0)];
        let got = s.solve(&a);
        assert_eq!(got == SolveResult::Sat, brute_force_sat(&cnf, 9, &a));
    }
}
