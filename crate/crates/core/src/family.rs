//! Benchmark generators: the reset counter, the bit-serial shift checker and
//! random AIGs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aiger::{AigBuilder, AigLit, TransitionSystem};
use crate::error::{Error, Result};

/// Unsigned `value >= threshold` over little-endian bits.
fn ge_const(b: &mut AigBuilder, bits: &[AigLit], threshold: u64) -> AigLit {
    if bits.len() < 64 && threshold >> bits.len() != 0 {
        return AigLit::FALSE;
    }
    let mut ge = AigLit::TRUE;
    for (i, &bit) in bits.iter().enumerate() {
        ge = if threshold >> i & 1 == 1 {
            b.and(bit, ge)
        } else {
            b.or(bit, ge)
        };
    }
    ge
}

fn eq_const(b: &mut AigBuilder, bits: &[AigLit], value: u64) -> AigLit {
    if bits.len() < 64 && value >> bits.len() != 0 {
        return AigLit::FALSE;
    }
    let lits: Vec<AigLit> = bits
        .iter()
        .enumerate()
        .map(|(i, &bit)| if value >> i & 1 == 1 { bit } else { !bit })
        .collect();
    b.and_all(&lits)
}

/// `bits + 1` and the outgoing carry.
fn increment(b: &mut AigBuilder, bits: &[AigLit]) -> Vec<AigLit> {
    let mut carry = AigLit::TRUE;
    let mut out = Vec::with_capacity(bits.len());
    for &bit in bits {
        out.push(b.xor(bit, carry));
        carry = b.and(bit, carry);
    }
    out
}

/// Which counter values are bad.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterBad {
    AtLeast(u64),
    Equal(u64),
}

fn counter(width: usize, reset_at: u64, bad: CounterBad) -> Result<TransitionSystem> {
    if width == 0 || width > 63 || reset_at >> width != 0 {
        return Err(Error::Usage(format!(
            "counter needs 1 <= width <= 63 and reset_at < 2^width, got width {width}, reset_at {reset_at}"
        )));
    }
    let mut b = AigBuilder::new();
    let regs: Vec<(usize, AigLit)> = (0..width).map(|_| b.latch(false)).collect();
    let bits: Vec<AigLit> = regs.iter().map(|r| r.1).collect();
    let at_reset = eq_const(&mut b, &bits, reset_at);
    let inc = increment(&mut b, &bits);
    for (&(idx, _), &next) in regs.iter().zip(&inc) {
        let n = b.and(!at_reset, next);
        b.set_next(idx, n);
    }
    let bad = match bad {
        CounterBad::AtLeast(t) => ge_const(&mut b, &bits, t),
        CounterBad::Equal(v) => eq_const(&mut b, &bits, v),
    };
    b.set_bad(bad);
    b.build().map_err(Error::Usage)
}

/// `c' = (c == reset_at) ? 0 : c + 1` from `c = 0`, bad when
/// `c >= bad_threshold`. `(8, 64, 66)` is the standard 2-inductive example.
pub fn gen_counter(width: usize, reset_at: u64, bad_threshold: u64) -> Result<TransitionSystem> {
    counter(width, reset_at, CounterBad::AtLeast(bad_threshold))
}

/// The same counter, bad exactly when `c == value`.
pub fn gen_counter_hitting(width: usize, reset_at: u64, value: u64) -> Result<TransitionSystem> {
    counter(width, reset_at, CounterBad::Equal(value))
}

/// Bit-serial search for `x, y` of `width` bits with `x + y == x << 1` and
/// `y != x`, which has no solution.
///
/// Each step reads bit `t` of `x` and `y` (least significant first). Latches
/// hold the carry of `x + y`, the previous bit of `x` (bit `t` of `x << 1`),
/// a flag that every sum bit so far matched, a flag that `x` and `y`
/// differed somewhere, and a position counter that saturates at `width`.
/// Bad fires on the last position when the final bit also matches and the
/// operands differ. Because the flags are unconstrained in unreachable
/// states, induction needs exactly `width` steps to reach back to position 0.
pub fn gen_shift(width: usize) -> Result<TransitionSystem> {
    if width == 0 {
        return Err(Error::Usage("shift width must be at least 1".into()));
    }
    let pos_bits = usize::BITS as usize - width.leading_zeros() as usize;
    let mut b = AigBuilder::new();
    let x = b.input();
    let y = b.input();
    let pos: Vec<(usize, AigLit)> = (0..pos_bits).map(|_| b.latch(false)).collect();
    let (carry_i, carry) = b.latch(false);
    let (prev_i, prev) = b.latch(false);
    let (ok_i, ok) = b.latch(true);
    let (diff_i, diff) = b.latch(false);
    let pos_lits: Vec<AigLit> = pos.iter().map(|p| p.1).collect();

    let xy = b.xor(x, y);
    let sum = b.xor(xy, carry);
    let matches = b.xnor(sum, prev);
    let ok_next = b.and(ok, matches);
    let diff_next = b.or(diff, xy);
    let t1 = b.and(x, y);
    let t2 = b.and(xy, carry);
    let carry_next = b.or(t1, t2);
    b.set_next(carry_i, carry_next);
    b.set_next(prev_i, x);
    b.set_next(ok_i, ok_next);
    b.set_next(diff_i, diff_next);

    let done = ge_const(&mut b, &pos_lits, width as u64);
    let inc = increment(&mut b, &pos_lits);
    for (&(idx, cur), &next) in pos.iter().zip(&inc) {
        let n = b.mux(done, cur, next);
        b.set_next(idx, n);
    }
    let last = eq_const(&mut b, &pos_lits, width as u64 - 1);
    let accept = b.and(ok_next, diff_next);
    let bad = b.and(last, accept);
    b.set_bad(bad);
    b.build().map_err(Error::Usage)
}

/// A deterministic random circuit with `latches` latches, up to `gates`
/// and-gates and one to three inputs. Bad is a conjunction of two or three
/// random signals so both verdicts occur.
pub fn gen_random_aig(seed: u64, latches: usize, gates: usize) -> TransitionSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = AigBuilder::new();
    let num_inputs = rng.gen_range(1..=3);
    let mut pool: Vec<AigLit> = (0..num_inputs).map(|_| b.input()).collect();
    let mut regs = Vec::with_capacity(latches);
    for _ in 0..latches {
        let init = rng.gen_bool(0.3);
        let (idx, l) = b.latch(init);
        regs.push(idx);
        pool.push(l);
    }
    let pick = |rng: &mut ChaCha8Rng, pool: &[AigLit]| {
        let l = pool[rng.gen_range(0..pool.len())];
        if rng.gen_bool(0.5) {
            !l
        } else {
            l
        }
    };
    for _ in 0..gates {
        let a = pick(&mut rng, &pool);
        let c = pick(&mut rng, &pool);
        let g = b.and(a, c);
        if !g.is_const() {
            pool.push(g);
        }
    }
    for idx in regs {
        let n = pick(&mut rng, &pool);
        b.set_next(idx, n);
    }
    let terms = rng.gen_range(2..=3);
    let lits: Vec<AigLit> = (0..terms).map(|_| pick(&mut rng, &pool)).collect();
    let bad = b.and_all(&lits);
    b.set_bad(bad);
    b.build().expect("every latch has a next-state function")
}
