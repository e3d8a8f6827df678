//! Literals, clauses and cubes over latch (state) variables.

use std::fmt;
use std::ops::Not;

/// A literal over latch `index`, encoded as `2 * index + negated`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatchLit(u32);

impl LatchLit {
    pub fn new(latch: usize, positive: bool) -> LatchLit {
        LatchLit((latch as u32) << 1 | (!positive) as u32)
    }

    pub fn latch(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Truth value under a full latch assignment.
    pub fn eval(self, state: &[bool]) -> bool {
        state[self.latch()] == self.is_positive()
    }
}

impl Not for LatchLit {
    type Output = LatchLit;
    fn not(self) -> LatchLit {
        LatchLit(self.0 ^ 1)
    }
}

impl fmt::Debug for LatchLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "l{}", self.latch())
        } else {
            write!(f, "!l{}", self.latch())
        }
    }
}

impl fmt::Display for LatchLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn canonical(mut lits: Vec<LatchLit>) -> Option<Vec<LatchLit>> {
    lits.sort_unstable();
    lits.dedup();
    if lits.windows(2).any(|w| w[0].latch() == w[1].latch()) {
        None
    } else {
        Some(lits)
    }
}

/// Disjunction of latch literals, sorted and free of duplicates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Clause(Vec<LatchLit>);

/// Conjunction of latch literals, sorted and free of duplicates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cube(Vec<LatchLit>);

impl Clause {
    /// `None` when the literals contain a complementary pair (tautology).
    pub fn new(lits: Vec<LatchLit>) -> Option<Clause> {
        canonical(lits).map(Clause)
    }

    pub fn lits(&self) -> &[LatchLit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, state: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(state))
    }

    /// Every literal of `self` occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        is_subset(&self.0, &other.0)
    }

    pub fn negate(&self) -> Cube {
        Cube(self.0.iter().map(|&l| !l).collect())
    }
}

impl Cube {
    /// `None` when the literals are contradictory.
    pub fn new(lits: Vec<LatchLit>) -> Option<Cube> {
        canonical(lits).map(Cube)
    }

    /// The minterm of a full latch assignment.
    pub fn from_state(state: &[bool]) -> Cube {
        Cube(
            state
                .iter()
                .enumerate()
                .map(|(i, &b)| LatchLit::new(i, b))
                .collect(),
        )
    }

    pub fn lits(&self) -> &[LatchLit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, state: &[bool]) -> bool {
        self.0.iter().all(|l| l.eval(state))
    }

    pub fn negate(&self) -> Clause {
        Clause(self.0.iter().map(|&l| !l).collect())
    }
}

fn is_subset(small: &[LatchLit], big: &[LatchLit]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &l in small {
        while j < big.len() && big[j] < l {
            j += 1;
        }
        if j == big.len() || big[j] != l {
            return false;
        }
        j += 1;
    }
    true
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" | "))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(" & "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_canonical_form() {
        let a = LatchLit::new(2, true);
        let b = LatchLit::new(0, false);
        let c = Clause::new(vec![a, b, a]).unwrap();
        assert_eq!(c.lits(), &[b, a]);
        assert!(Clause::new(vec![a, !a]).is_none());
    }

    #[test]
    fn subsumption() {
        let l = |i, p| LatchLit::new(i, p);
        let small = Clause::new(vec![l(1, true)]).unwrap();
        let big = Clause::new(vec![l(0, false), l(1, true), l(3, true)]).unwrap();
        assert!(small.subsumes(&big));
        assert!(!big.subsumes(&small));
        assert!(!Clause::new(vec![l(1, false)]).unwrap().subsumes(&big));
    }

    #[test]
    fn minterm_evaluates_only_on_its_state() {
        let s = [true, false, true];
        let cube = Cube::from_state(&s);
        assert!(cube.eval(&s));
        assert!(!cube.eval(&[true, true, true]));
        assert!(!cube.negate().eval(&s));
    }
}
