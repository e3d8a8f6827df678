//! Explicit-state helpers shared by the integration tests: random safe
//! traces built from state sets, and an enumeration oracle for strong
//! extension levels that never touches the SAT solver.

#![allow(dead_code)]

use std::collections::HashSet;

use kavy::aiger::TransitionSystem;
use kavy::family::gen_random_aig;
use kavy::oracle::{decode_state, encode_state};
use kavy::state::{Clause, LatchLit};
use kavy::trace::{InductiveTrace, Sel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StateSet = HashSet<u64>;

pub fn all_inputs(ts: &TransitionSystem) -> Vec<Vec<bool>> {
    (0..1u64 << ts.num_inputs())
        .map(|c| decode_state(c, ts.num_inputs()))
        .collect()
}

pub fn image(ts: &TransitionSystem, set: &StateSet) -> StateSet {
    let inputs = all_inputs(ts);
    let mut out = StateSet::new();
    for &code in set {
        let s = decode_state(code, ts.num_latches());
        for inp in &inputs {
            out.insert(encode_state(&ts.step(&s, inp).0));
        }
    }
    out
}

/// Some input makes `Bad` true in this state.
pub fn can_fail(ts: &TransitionSystem, code: u64) -> bool {
    let s = decode_state(code, ts.num_latches());
    all_inputs(ts).iter().any(|inp| ts.step(&s, inp).1)
}

/// The clauses excluding every state outside `set`.
pub fn blocking_clauses(num_latches: usize, set: &StateSet) -> Vec<Clause> {
    (0..1u64 << num_latches)
        .filter(|c| !set.contains(c))
        .map(|c| {
            let lits = (0..num_latches)
                .map(|l| LatchLit::new(l, c >> l & 1 == 0))
                .collect();
            Clause::new(lits).expect("non-empty")
        })
        .collect()
}

/// A monotone clausal safe trace together with the state sets of its
/// frames (`sets[0]` is the initial state).
pub struct RandomTrace {
    pub ts: TransitionSystem,
    pub trace: InductiveTrace,
    pub sets: Vec<StateSet>,
}

impl RandomTrace {
    pub fn size(&self) -> usize {
        self.sets.len() - 1
    }

    /// `Tr[F^(i,k)] & Bad(v_{N+1})` by forward image over the state sets.
    pub fn char_sat(&self, sel: Sel) -> bool {
        let n = self.size();
        let start = sel.i + 1 - sel.k;
        let frame = |j: usize| &self.sets[if j <= sel.i { sel.i } else { j }];
        let mut cur: StateSet = frame(start).clone();
        for j in start + 1..=n {
            cur = image(&self.ts, &cur)
                .intersection(frame(j))
                .copied()
                .collect();
        }
        image(&self.ts, &cur)
            .into_iter()
            .any(|c| can_fail(&self.ts, c))
    }

    /// Every valid level and depth with an unsatisfiable characteristic
    /// formula.
    pub fn all_sels(&self) -> Vec<Sel> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..=n {
            for k in 1..=i + 1 {
                let sel = Sel::new(i, k);
                if !self.char_sat(sel) {
                    out.push(sel);
                }
            }
        }
        out
    }

    pub fn max_sel(&self) -> Option<Sel> {
        self.all_sels().into_iter().max()
    }

    pub fn max_extension_level(&self) -> Option<usize> {
        (0..=self.size())
            .rev()
            .find(|&i| !self.char_sat(Sel::new(i, 1)))
    }

    pub fn is_extendable(&self) -> bool {
        !self.char_sat(Sel::new(0, 1))
    }
}

/// A random circuit and a random monotone safe trace over it. Each frame
/// is the previous frame, its image and a few random safe states; the trace
/// stops before the first frame that would contain a failing state.
pub fn random_trace(seed: u64, max_latches: usize, max_frames: usize) -> Option<RandomTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latches = rng.gen_range(2..=max_latches);
    let gates = rng.gen_range(4..=6 * latches);
    let ts = gen_random_aig(rng.gen(), latches, gates);
    let init = encode_state(&ts.initial_state());
    if can_fail(&ts, init) {
        return None;
    }
    let target = rng.gen_range(1..=max_frames);
    let extra = rng.gen_range(0.0..0.3);
    let mut sets = vec![StateSet::from([init])];
    while sets.len() <= target {
        let prev = sets.last().unwrap();
        let mut next: StateSet = prev.union(&image(&ts, prev)).copied().collect();
        for c in 0..1u64 << latches {
            if rng.gen_bool(extra) {
                next.insert(c);
            }
        }
        next.retain(|&c| !can_fail(&ts, c) || prev.contains(&c));
        if next.iter().any(|&c| can_fail(&ts, c)) || !image(&ts, prev).is_subset(&next) {
            break;
        }
        sets.push(next);
    }
    let frames: Vec<Vec<Clause>> = sets[1..]
        .iter()
        .map(|s| blocking_clauses(latches, s))
        .collect();
    let trace = InductiveTrace::from_frames(&ts, &frames);
    Some(RandomTrace { ts, trace, sets })
}

/// A random trace that has an extension level.
pub fn random_extendable_trace(
    seed: u64,
    max_latches: usize,
    max_frames: usize,
) -> Option<RandomTrace> {
    random_trace(seed, max_latches, max_frames).filter(|t| t.is_extendable())
}

/// Every state satisfying all clauses.
pub fn models(num_latches: usize, clauses: &[Clause]) -> StateSet {
    (0..1u64 << num_latches)
        .filter(|&c| {
            let s = decode_state(c, num_latches);
            clauses.iter().all(|cl| cl.eval(&s))
        })
        .collect()
}
