//! Explicit-state breadth-first reachability, the ground truth for small
//! systems.

use std::collections::HashSet;

use crate::aiger::TransitionSystem;
use crate::error::{Error, Result};

pub const DEFAULT_LATCH_BOUND: usize = 20;
pub const INPUT_BOUND: usize = 8;

#[derive(Clone, Debug)]
pub struct BfsResult {
    /// Reachable states, latch `l` at bit `l`.
    pub reachable: HashSet<u64>,
    /// Length of a shortest counterexample (transitions), if any.
    pub shortest_cex: Option<usize>,
}

impl BfsResult {
    pub fn is_safe(&self) -> bool {
        self.shortest_cex.is_none()
    }
}

pub fn encode_state(state: &[bool]) -> u64 {
    state
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
}

pub fn decode_state(code: u64, num_latches: usize) -> Vec<bool> {
    (0..num_latches).map(|i| code >> i & 1 == 1).collect()
}

/// Explores every reachable state with [`DEFAULT_LATCH_BOUND`].
pub fn bfs_reachable(ts: &TransitionSystem) -> Result<BfsResult> {
    bfs_reachable_bounded(ts, DEFAULT_LATCH_BOUND)
}

/// Explores every reachable state, enumerating all input vectors per state.
/// The whole reachable set is computed even after a bad state is found.
pub fn bfs_reachable_bounded(ts: &TransitionSystem, latch_bound: usize) -> Result<BfsResult> {
    if ts.num_latches() > latch_bound {
        return Err(Error::Usage(format!(
            "oracle refuses {} latches (bound {latch_bound})",
            ts.num_latches()
        )));
    }
    if ts.num_inputs() > INPUT_BOUND {
        return Err(Error::Usage(format!(
            "oracle refuses {} inputs (bound {INPUT_BOUND})",
            ts.num_inputs()
        )));
    }
    let n = ts.num_latches();
    let inputs: Vec<Vec<bool>> = (0..1u64 << ts.num_inputs())
        .map(|c| decode_state(c, ts.num_inputs()))
        .collect();
    let init = encode_state(&ts.initial_state());
    let mut reachable = HashSet::from([init]);
    let mut frontier = vec![init];
    let mut shortest_cex = None;
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for &code in &frontier {
            let state = decode_state(code, n);
            for inp in &inputs {
                let (next, bad) = ts.step(&state, inp);
                if bad && shortest_cex.is_none() {
                    shortest_cex = Some(depth);
                }
                let c = encode_state(&next);
                if reachable.insert(c) {
                    next_frontier.push(c);
                }
            }
        }
        frontier = next_frontier;
        depth += 1;
    }
    Ok(BfsResult {
        reachable,
        shortest_cex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_aiger;
    use crate::family::{gen_counter, gen_counter_hitting};

    #[test]
    fn counter_reaches_zero_to_sixty_four() {
        let r = bfs_reachable(&gen_counter(8, 64, 66).unwrap()).unwrap();
        let expect: HashSet<u64> = (0..=64).collect();
        assert_eq!(r.reachable, expect);
        assert!(r.is_safe());
    }

    #[test]
    fn toggle_reaches_both_states() {
        // x' = !x
        let ts = parse_aiger(b"aag 1 0 1 0 0 1\n2 3\n0\n").unwrap();
        let r = bfs_reachable(&ts).unwrap();
        assert_eq!(r.reachable, HashSet::from([0, 1]));
        assert!(r.is_safe());
    }

    #[test]
    fn counter_hitting_three() {
        let r = bfs_reachable(&gen_counter_hitting(8, 64, 3).unwrap()).unwrap();
        assert_eq!(r.shortest_cex, Some(3));
    }

    #[test]
    fn small_counter_variants() {
        let r = bfs_reachable(&gen_counter(3, 4, 6).unwrap()).unwrap();
        assert_eq!(r.reachable, (0..=4).collect());
        assert!(r.is_safe());
        assert!(bfs_reachable(&gen_counter(8, 64, 65).unwrap())
            .unwrap()
            .is_safe());
    }

    #[test]
    fn refuses_large_systems() {
        let ts = gen_counter(8, 64, 66).unwrap();
        assert!(bfs_reachable_bounded(&ts, 4).is_err());
    }

    #[test]
    fn passthrough_is_unsafe_at_zero() {
        let ts = parse_aiger(b"aag 1 1 0 1 0\n2\n2\n").unwrap();
        assert_eq!(bfs_reachable(&ts).unwrap().shortest_cex, Some(0));
    }
}
