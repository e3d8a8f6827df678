//! Property tests against explicit-state oracles.

mod common;

use common::{models, random_extendable_trace, random_trace};
use kavy::certify::{check_invariant, check_result};
use kavy::check::{Certificate, CheckResult, EngineOptions, SelStrategy};
use kavy::cnf::{encode_tr, Unroller};
use kavy::experiment::{run_engine, EngineKind};
use kavy::family::gen_random_aig;
use kavy::formula::Formula;
use kavy::itp::{refute_and_interpolate, validate_seq_interpolant, ItpPartition};
use kavy::kavy::{
    is_k_inductive_relative, kavy_extend, max_sel_bottomup, max_sel_topdown, NoObserver,
};
use kavy::oracle::{bfs_reachable, decode_state};
use kavy::sat::{Lit, SolveResult, Solver};
use kavy::trace::Sel;
use proptest::prelude::*;

fn opts() -> EngineOptions {
    EngineOptions {
        validate_itp: true,
        ..EngineOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sel_searches_match_enumeration(seed in any::<u64>()) {
        let Some(rt) = random_extendable_trace(seed, 5, 4) else { return Ok(()) };
        let expected = rt.max_sel().unwrap();
        let td = max_sel_topdown(&rt.ts, &rt.trace, &opts()).unwrap();
        let bu = max_sel_bottomup(&rt.ts, &rt.trace, &opts(), None).unwrap();
        prop_assert_eq!(td.sel, expected);
        prop_assert_eq!(bu.sel, expected);
        let n = rt.size() as u64;
        prop_assert!(td.suffix_queries <= n + 1);
        prop_assert!(bu.queries() <= 3 * n.max(1));
    }

    #[test]
    fn trace_predicates_match_state_sets(seed in any::<u64>()) {
        let Some(rt) = random_trace(seed, 5, 4) else { return Ok(()) };
        let (ts, t) = (&rt.ts, &rt.trace);
        prop_assert!(t.is_trace(ts));
        prop_assert!(t.is_safe(ts));
        prop_assert!(t.is_monotone(ts));
        prop_assert_eq!(t.max_extension_level(ts), rt.max_extension_level());
        for j in 1..=rt.size() {
            prop_assert_eq!(&models(ts.num_latches(), &t.frame_clauses(j)), &rt.sets[j]);
        }
        for i in 0..=rt.size() {
            for k in 1..=i + 1 {
                let sel = Sel::new(i, k);
                prop_assert_eq!(t.is_sel(ts, sel).unwrap(), !rt.char_sat(sel), "{:?}", sel);
            }
        }
        let closed = (1..=rt.size()).any(|i| {
            let union: common::StateSet = rt.sets[..i].iter().flatten().copied().collect();
            rt.sets[i].is_subset(&union)
        });
        prop_assert_eq!(t.is_closed(ts), closed);
    }

    #[test]
    fn transition_encoding_matches_simulation(seed in any::<u64>(), state in any::<u64>(), inp in any::<u64>()) {
        let ts = gen_random_aig(seed, 6, 30);
        let s = decode_state(state, ts.num_latches());
        let x = decode_state(inp, ts.num_inputs());
        let (next, bad) = ts.step(&s, &x);
        let mut solver = Solver::new();
        let mut u = Unroller::new(&ts);
        u.add_transition(&mut solver, 0, 0);
        let mut assume = Vec::new();
        for (l, &b) in s.iter().enumerate() {
            let v = Lit::pos(u.latch_var(&mut solver, l, 0));
            assume.push(if b { v } else { !v });
        }
        for (i, &b) in x.iter().enumerate() {
            let v = Lit::pos(u.input_var(&mut solver, i, 0));
            assume.push(if b { v } else { !v });
        }
        let bad_enc = u.encode_bad(&mut solver, 0, 0);
        prop_assert_eq!(solver.solve(&assume), SolveResult::Sat);
        prop_assert_eq!(u.read_state(&solver, 1), next);
        match bad_enc {
            kavy::cnf::Enc::Const(c) => prop_assert_eq!(c, bad),
            kavy::cnf::Enc::Lit(l) => prop_assert_eq!(solver.model_value(l), bad),
        }
        // the standalone encoding has exactly the simulated successors
        let (cnf, _) = encode_tr(&ts, 0);
        prop_assert!(cnf.is_sat() || ts.num_latches() == 0);
    }

    #[test]
    fn interpolants_satisfy_the_conditions(seed in any::<u64>()) {
        let Some(rt) = random_extendable_trace(seed, 5, 4) else { return Ok(()) };
        for sel in rt.all_sels() {
            let part = ItpPartition::characteristic(&rt.ts, &rt.trace, sel).unwrap();
            let itp = refute_and_interpolate(&part).unwrap().expect("unsatisfiable");
            prop_assert_eq!(itp.len(), part.num_groups - 1);
            prop_assert!(validate_seq_interpolant(&itp, &part).is_ok(), "{:?}", sel);
        }
    }

    #[test]
    fn extension_without_generalization_keeps_the_invariants(seed in any::<u64>()) {
        let Some(rt) = random_extendable_trace(seed, 5, 3) else { return Ok(()) };
        let o = EngineOptions { gen_enabled: false, ..opts() };
        let (ts, t) = (&rt.ts, &rt.trace);
        for sel in rt.all_sels() {
            let g = kavy_extend(ts, t, sel, &o, &mut NoObserver).unwrap().trace;
            prop_assert_eq!(g.size(), t.size() + 1);
            prop_assert!(g.is_trace(ts) && g.is_safe(ts) && g.is_monotone(ts));
            prop_assert!(g.is_stronger_than(t, ts));
            let mut f = Formula::new();
            let top = g.frame_formula(sel.i + 1, &mut f);
            prop_assert!(is_k_inductive_relative(ts, t, sel.i, sel.k, &f, top), "{:?}", sel);
        }
    }

    #[test]
    fn engine_verdicts_are_certified(seed in any::<u64>()) {
        let ts = gen_random_aig(seed, 6, 24);
        let truth = bfs_reachable(&ts).unwrap();
        for engine in kavy::experiment::EngineKind::ALL {
            let o = EngineOptions { max_frames: 40, sel: SelStrategy::BottomUp, ..opts() };
            let run = run_engine(engine, &ts, &o).unwrap();
            prop_assert!(check_result(&run.result, &ts).unwrap(), "{} {}", engine, run.result);
            match &run.result {
                CheckResult::Safe(c) => {
                    prop_assert!(truth.is_safe(), "{}", engine);
                    if let Certificate::Invariant(inv) = c {
                        let states = models(ts.num_latches(), inv);
                        prop_assert!(truth.reachable.is_subset(&states));
                    }
                }
                CheckResult::Unsafe(w) => {
                    prop_assert!(!truth.is_safe(), "{}", engine);
                    prop_assert!(w.depth() >= truth.shortest_cex.unwrap());
                    if engine == EngineKind::Bmc {
                        prop_assert_eq!(Some(w.depth()), truth.shortest_cex);
                    }
                }
                CheckResult::Unknown { .. } => prop_assert!(engine == EngineKind::Bmc && truth.is_safe()),
            }
        }
    }
}

#[test]
fn reachable_set_is_an_invariant_when_safe() {
    let mut seen = 0;
    for seed in 0..200 {
        let ts = gen_random_aig(seed, 5, 20);
        let truth = bfs_reachable(&ts).unwrap();
        if !truth.is_safe() {
            continue;
        }
        let inv = common::blocking_clauses(ts.num_latches(), &truth.reachable);
        assert!(check_invariant(&inv, &ts), "seed {seed}");
        seen += 1;
    }
    assert!(seen > 10);
}

/// A trace where a full push inside the extension would strengthen `G_2`
/// below `F_2` and with it `G_3` below the image of `F_2`.
#[test]
fn extension_push_leaves_the_induction_frame_alone() {
    let rt = random_extendable_trace(14154408565416499161, 5, 3).unwrap();
    let (ts, t) = (&rt.ts, &rt.trace);
    let o = EngineOptions {
        gen_enabled: false,
        ..opts()
    };
    let sel = Sel::new(2, 1);
    let g = kavy_extend(ts, t, sel, &o, &mut NoObserver).unwrap().trace;
    let mut f = Formula::new();
    let top = g.frame_formula(3, &mut f);
    assert!(is_k_inductive_relative(ts, t, 2, 1, &f, top));
}
