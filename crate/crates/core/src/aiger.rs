//! AIGER input and output, and the transition system it denotes.
//!
//! Parsed circuits are renumbered canonically: variable 0 is the constant,
//! inputs come first, then latches, then and-gates in topological order.
//! Latches with an unconstrained initial value are expanded at parse time
//! into a zero-initialized latch, a fresh input and a first-cycle flag, so
//! the initial states always form a single cube over the latches.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Not;

use crate::error::ParseError;
use crate::state::{Cube, LatchLit};

/// An AIGER literal: `2 * variable + negated`. 0 is false, 1 is true.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AigLit(pub u32);

impl AigLit {
    pub const FALSE: AigLit = AigLit(0);
    pub const TRUE: AigLit = AigLit(1);

    pub fn from_var(var: u32, negated: bool) -> AigLit {
        AigLit(var << 1 | negated as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }
}

impl Not for AigLit {
    type Output = AigLit;
    fn not(self) -> AigLit {
        AigLit(self.0 ^ 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Latch {
    pub next: AigLit,
    pub init: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
}

/// A safety verification problem: inputs, initialized latches, gates and a
/// single bad-state literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    num_inputs: usize,
    latches: Vec<Latch>,
    ands: Vec<(AigLit, AigLit)>,
    bad: AigLit,
    /// Symbol table lines for inputs and latches, passed through verbatim.
    symbols: Vec<String>,
}

impl TransitionSystem {
    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    pub fn num_ands(&self) -> usize {
        self.ands.len()
    }

    pub fn max_var(&self) -> u32 {
        (self.num_inputs + self.latches.len() + self.ands.len()) as u32
    }

    pub fn latches(&self) -> &[Latch] {
        &self.latches
    }

    pub fn ands(&self) -> &[(AigLit, AigLit)] {
        &self.ands
    }

    pub fn bad(&self) -> AigLit {
        self.bad
    }

    pub fn input_lit(&self, i: usize) -> AigLit {
        AigLit::from_var(1 + i as u32, false)
    }

    pub fn latch_lit(&self, l: usize) -> AigLit {
        AigLit::from_var((1 + self.num_inputs + l) as u32, false)
    }

    pub fn gate_lit(&self, g: usize) -> AigLit {
        AigLit::from_var((1 + self.num_inputs + self.latches.len() + g) as u32, false)
    }

    pub fn var_kind(&self, var: u32) -> VarKind {
        let v = var as usize;
        let i = self.num_inputs;
        let l = self.latches.len();
        if v == 0 {
            VarKind::Const
        } else if v <= i {
            VarKind::Input(v - 1)
        } else if v <= i + l {
            VarKind::Latch(v - 1 - i)
        } else {
            VarKind::And(v - 1 - i - l)
        }
    }

    pub fn initial_state(&self) -> Vec<bool> {
        self.latches.iter().map(|l| l.init).collect()
    }

    /// Conjunction of the latch initial values; exactly the initial states.
    pub fn initial_cube(&self) -> Cube {
        Cube::new(
            self.latches
                .iter()
                .enumerate()
                .map(|(i, l)| LatchLit::new(i, l.init))
                .collect(),
        )
        .expect("one literal per latch")
    }

    /// Values of every variable for one time frame.
    pub fn eval_frame(&self, state: &[bool], inputs: &[bool]) -> Vec<bool> {
        assert_eq!(state.len(), self.latches.len());
        assert_eq!(inputs.len(), self.num_inputs);
        let mut val = Vec::with_capacity(self.max_var() as usize + 1);
        val.push(false);
        val.extend_from_slice(inputs);
        val.extend_from_slice(state);
        for &(a, b) in &self.ands {
            let va = val[a.var() as usize] ^ a.is_negated();
            let vb = val[b.var() as usize] ^ b.is_negated();
            val.push(va && vb);
        }
        val
    }

    pub fn lit_value(values: &[bool], lit: AigLit) -> bool {
        values[lit.var() as usize] ^ lit.is_negated()
    }

    /// Successor state and the value of the bad literal in the current frame.
    pub fn step(&self, state: &[bool], inputs: &[bool]) -> (Vec<bool>, bool) {
        let val = self.eval_frame(state, inputs);
        let next = self
            .latches
            .iter()
            .map(|l| Self::lit_value(&val, l.next))
            .collect();
        (next, Self::lit_value(&val, self.bad))
    }

    /// Serializes as ASCII AIGER with the property as a bad-state line.
    pub fn to_aag(&self) -> String {
        let mut s = String::new();
        let i = self.num_inputs;
        let l = self.latches.len();
        let a = self.ands.len();
        let _ = writeln!(s, "aag {} {} {} 0 {} 1", self.max_var(), i, l, a);
        for k in 0..i {
            let _ = writeln!(s, "{}", self.input_lit(k).0);
        }
        for (k, latch) in self.latches.iter().enumerate() {
            if latch.init {
                let _ = writeln!(s, "{} {} 1", self.latch_lit(k).0, latch.next.0);
            } else {
                let _ = writeln!(s, "{} {}", self.latch_lit(k).0, latch.next.0);
            }
        }
        let _ = writeln!(s, "{}", self.bad.0);
        for (g, &(x, y)) in self.ands.iter().enumerate() {
            let _ = writeln!(s, "{} {} {}", self.gate_lit(g).0, x.0, y.0);
        }
        for sym in &self.symbols {
            let _ = writeln!(s, "{sym}");
        }
        s
    }
}

enum BuildNode {
    Const,
    Input,
    Latch,
    And(AigLit, AigLit),
}

/// Incremental construction of a [`TransitionSystem`] with structural
/// hashing. Literals handed out by the builder use its own numbering and are
/// renumbered canonically by [`AigBuilder::build`].
pub struct AigBuilder {
    nodes: Vec<BuildNode>,
    strash: HashMap<(AigLit, AigLit), AigLit>,
    inputs: Vec<u32>,
    latches: Vec<(u32, Option<AigLit>, bool)>,
    bad: Option<AigLit>,
    symbols: Vec<String>,
}

impl Default for AigBuilder {
    fn default() -> Self {
        AigBuilder::new()
    }
}

impl AigBuilder {
    pub fn new() -> AigBuilder {
        AigBuilder {
            nodes: vec![BuildNode::Const],
            strash: HashMap::new(),
            inputs: Vec::new(),
            latches: Vec::new(),
            bad: None,
            symbols: Vec::new(),
        }
    }

    pub fn input(&mut self) -> AigLit {
        let v = self.nodes.len() as u32;
        self.nodes.push(BuildNode::Input);
        self.inputs.push(v);
        AigLit::from_var(v, false)
    }

    /// A latch with the given initial value; its next-state function is set
    /// later with [`AigBuilder::set_next`]. Returns (latch index, literal).
    pub fn latch(&mut self, init: bool) -> (usize, AigLit) {
        let v = self.nodes.len() as u32;
        self.nodes.push(BuildNode::Latch);
        self.latches.push((v, None, init));
        (self.latches.len() - 1, AigLit::from_var(v, false))
    }

    pub fn set_next(&mut self, latch: usize, next: AigLit) {
        self.latches[latch].1 = Some(next);
    }

    pub fn set_bad(&mut self, bad: AigLit) {
        self.bad = Some(bad);
    }

    pub fn and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        if a == AigLit::FALSE || b == AigLit::FALSE || a == !b {
            return AigLit::FALSE;
        }
        if a == AigLit::TRUE || a == b {
            return b;
        }
        if b == AigLit::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&l) = self.strash.get(&key) {
            return l;
        }
        let v = self.nodes.len() as u32;
        self.nodes.push(BuildNode::And(key.0, key.1));
        let l = AigLit::from_var(v, false);
        self.strash.insert(key, l);
        l
    }

    pub fn or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let both = self.and(a, b);
        let neither = self.and(!a, !b);
        self.and(!both, !neither)
    }

    pub fn xnor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        !self.xor(a, b)
    }

    /// `if s then t else e`
    pub fn mux(&mut self, s: AigLit, t: AigLit, e: AigLit) -> AigLit {
        let a = self.and(s, t);
        let b = self.and(!s, e);
        self.or(a, b)
    }

    pub fn and_all(&mut self, lits: &[AigLit]) -> AigLit {
        lits.iter().fold(AigLit::TRUE, |acc, &l| self.and(acc, l))
    }

    pub fn or_all(&mut self, lits: &[AigLit]) -> AigLit {
        lits.iter().fold(AigLit::FALSE, |acc, &l| self.or(acc, l))
    }

    pub fn add_symbol(&mut self, line: String) {
        self.symbols.push(line);
    }

    /// Renumbers canonically. Fails if a latch has no next-state function or
    /// the property is missing.
    pub fn build(self) -> Result<TransitionSystem, String> {
        let bad = self.bad.ok_or("no property")?;
        let mut map = vec![0u32; self.nodes.len()];
        let mut next_var = 1u32;
        for &v in &self.inputs {
            map[v as usize] = next_var;
            next_var += 1;
        }
        for &(v, _, _) in &self.latches {
            map[v as usize] = next_var;
            next_var += 1;
        }
        let tr = |map: &[u32], l: AigLit| AigLit::from_var(map[l.var() as usize], l.is_negated());
        let mut ands = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            if let BuildNode::And(a, b) = node {
                map[v] = next_var;
                next_var += 1;
                let (x, y) = (tr(&map, *a), tr(&map, *b));
                ands.push(if x < y { (x, y) } else { (y, x) });
            }
        }
        let mut latches = Vec::with_capacity(self.latches.len());
        for (k, &(_, next, init)) in self.latches.iter().enumerate() {
            let next = next.ok_or_else(|| format!("latch {k} has no next-state function"))?;
            latches.push(Latch {
                next: tr(&map, next),
                init,
            });
        }
        Ok(TransitionSystem {
            num_inputs: self.inputs.len(),
            latches,
            ands,
            bad: tr(&map, bad),
            symbols: self.symbols,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RawInit {
    Zero,
    One,
    Free,
}

struct RawAig {
    max_var: u32,
    inputs: Vec<u32>,
    latches: Vec<(u32, u32, RawInit, usize)>,
    ands: Vec<(u32, u32, u32, usize)>,
    properties: Vec<(u32, usize)>,
    symbols: Vec<String>,
}

fn parse_num(tok: &str, line: usize) -> Result<u32, ParseError> {
    tok.parse::<u32>()
        .map_err(|_| ParseError::new(line, format!("expected unsigned integer, found {tok:?}")))
}

struct Lines<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        if self.pos >= self.text.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos] != b'\n' {
            self.pos += 1;
        }
        let end = self.pos;
        if self.pos < self.text.len() {
            self.pos += 1;
        }
        self.line += 1;
        let s = std::str::from_utf8(&self.text[start..end]).unwrap_or("\u{fffd}");
        Some((self.line, s.trim_end_matches('\r')))
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let at = self.line + 1;
        self.next_line()
            .ok_or_else(|| ParseError::new(at, format!("unexpected end of file, expected {what}")))
    }
}

fn read_header(lines: &mut Lines) -> Result<(bool, [u32; 9]), ParseError> {
    let (ln, header) = lines.expect_line("header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let binary = match toks.first() {
        Some(&"aag") => false,
        Some(&"aig") => true,
        _ => {
            return Err(ParseError::new(
                ln,
                "malformed header: expected \"aag\" or \"aig\"",
            ))
        }
    };
    if toks.len() < 6 || toks.len() > 10 {
        return Err(ParseError::new(
            ln,
            "malformed header: expected M I L O A [B C J F]",
        ));
    }
    let mut h = [0u32; 9];
    for (k, t) in toks[1..].iter().enumerate() {
        h[k] = parse_num(t, ln)?;
    }
    Ok((binary, h))
}

fn parse_raw(bytes: &[u8]) -> Result<RawAig, ParseError> {
    let mut lines = Lines {
        text: bytes,
        pos: 0,
        line: 0,
    };
    let (binary, h) = read_header(&mut lines)?;
    let [m, i, l, o, a, b, c, _j, _f] = h;
    if c > 0 {
        return Err(ParseError::new(
            1,
            "invariant constraints are not supported",
        ));
    }
    if (i as u64) + (l as u64) + (a as u64) > m as u64 {
        return Err(ParseError::new(1, "malformed header: M < I + L + A"));
    }
    let check_lit = |lit: u32, ln: usize| -> Result<u32, ParseError> {
        if lit / 2 > m {
            Err(ParseError::new(
                ln,
                format!("literal {lit} exceeds maximum variable {m}"),
            ))
        } else {
            Ok(lit)
        }
    };
    let mut raw = RawAig {
        max_var: m,
        inputs: Vec::new(),
        latches: Vec::new(),
        ands: Vec::new(),
        properties: Vec::new(),
        symbols: Vec::new(),
    };
    for k in 0..i {
        if binary {
            raw.inputs.push(2 * (k + 1));
        } else {
            let (ln, s) = lines.expect_line("input")?;
            let lit = check_lit(parse_num(s.trim(), ln)?, ln)?;
            if lit < 2 || lit & 1 == 1 {
                return Err(ParseError::new(
                    ln,
                    "input must be a positive variable literal",
                ));
            }
            raw.inputs.push(lit);
        }
    }
    for k in 0..l {
        let (ln, s) = lines.expect_line("latch")?;
        let toks: Vec<&str> = s.split_whitespace().collect();
        let (lit, rest) = if binary {
            (2 * (i + k + 1), &toks[..])
        } else {
            if toks.is_empty() {
                return Err(ParseError::new(ln, "empty latch line"));
            }
            (check_lit(parse_num(toks[0], ln)?, ln)?, &toks[1..])
        };
        if lit < 2 || lit & 1 == 1 {
            return Err(ParseError::new(
                ln,
                "latch must be a positive variable literal",
            ));
        }
        if rest.is_empty() || rest.len() > 2 {
            return Err(ParseError::new(ln, "malformed latch line"));
        }
        let next = check_lit(parse_num(rest[0], ln)?, ln)?;
        let init = match rest.get(1) {
            None => RawInit::Zero,
            Some(t) => {
                let v = parse_num(t, ln)?;
                if v == 0 {
                    RawInit::Zero
                } else if v == 1 {
                    RawInit::One
                } else if v == lit {
                    RawInit::Free
                } else {
                    return Err(ParseError::new(
                        ln,
                        format!("invalid latch initial value {v}"),
                    ));
                }
            }
        };
        raw.latches.push((lit, next, init, ln));
    }
    let mut outputs = Vec::new();
    for _ in 0..o {
        let (ln, s) = lines.expect_line("output")?;
        outputs.push((check_lit(parse_num(s.trim(), ln)?, ln)?, ln));
    }
    let mut bads = Vec::new();
    for _ in 0..b {
        let (ln, s) = lines.expect_line("bad-state property")?;
        bads.push((check_lit(parse_num(s.trim(), ln)?, ln)?, ln));
    }
    // justice and fairness sections are skipped
    if _j > 0 {
        let mut sizes = Vec::new();
        for _ in 0.._j {
            let (ln, s) = lines.expect_line("justice size")?;
            sizes.push(parse_num(s.trim(), ln)?);
        }
        for n in sizes {
            for _ in 0..n {
                lines.expect_line("justice literal")?;
            }
        }
    }
    for _ in 0.._f {
        lines.expect_line("fairness literal")?;
    }
    if binary {
        let mut pos = lines.pos;
        let mut decode = |ln: usize| -> Result<u32, ParseError> {
            let mut x: u32 = 0;
            let mut shift = 0;
            loop {
                let byte = *bytes.get(pos).ok_or_else(|| {
                    ParseError::new(ln, "unexpected end of binary and-gate section")
                })?;
                pos += 1;
                x |= ((byte & 0x7f) as u32) << shift;
                if byte & 0x80 == 0 {
                    return Ok(x);
                }
                shift += 7;
                if shift > 28 {
                    return Err(ParseError::new(ln, "binary delta overflow"));
                }
            }
        };
        let ln = lines.line + 1;
        for k in 0..a {
            let lhs = 2 * (i + l + k + 1);
            let d0 = decode(ln)?;
            let d1 = decode(ln)?;
            let rhs0 = lhs
                .checked_sub(d0)
                .ok_or_else(|| ParseError::new(ln, "invalid binary delta"))?;
            let rhs1 = rhs0
                .checked_sub(d1)
                .ok_or_else(|| ParseError::new(ln, "invalid binary delta"))?;
            raw.ands.push((lhs, rhs0, rhs1, ln));
        }
        lines.pos = pos;
    } else {
        for _ in 0..a {
            let (ln, s) = lines.expect_line("and gate")?;
            let toks: Vec<&str> = s.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(ParseError::new(ln, "and gate must have three literals"));
            }
            let lhs = check_lit(parse_num(toks[0], ln)?, ln)?;
            let r0 = check_lit(parse_num(toks[1], ln)?, ln)?;
            let r1 = check_lit(parse_num(toks[2], ln)?, ln)?;
            if lhs < 2 || lhs & 1 == 1 {
                return Err(ParseError::new(
                    ln,
                    "and gate output must be a positive variable literal",
                ));
            }
            raw.ands.push((lhs, r0, r1, ln));
        }
    }
    while let Some((_, s)) = lines.next_line() {
        if s == "c" {
            break;
        }
        if s.starts_with('i') || s.starts_with('l') {
            raw.symbols.push(s.to_string());
        }
    }
    raw.properties = if bads.is_empty() { outputs } else { bads };
    Ok(raw)
}

/// Parses an AIGER file with exactly one property.
pub fn parse_aiger(bytes: &[u8]) -> Result<TransitionSystem, ParseError> {
    parse_aiger_property(bytes, None)
}

/// Parses an AIGER file, selecting property `index` when there are several
/// (bad-state lines take precedence over outputs).
pub fn parse_aiger_property(
    bytes: &[u8],
    index: Option<usize>,
) -> Result<TransitionSystem, ParseError> {
    let raw = parse_raw(bytes)?;
    let count = raw.properties.len();
    let prop = match (count, index) {
        (0, _) => return Err(ParseError::new(1, "no property")),
        (_, Some(k)) if k < count => raw.properties[k],
        (_, Some(k)) => {
            return Err(ParseError::new(
                1,
                format!("property index {k} out of range ({count} properties)"),
            ))
        }
        (1, None) => raw.properties[0],
        (_, None) => {
            return Err(ParseError::new(
                raw.properties[1].1,
                format!("{count} properties; select one with a property index"),
            ))
        }
    };
    build(&raw, prop)
}

fn build(raw: &RawAig, prop: (u32, usize)) -> Result<TransitionSystem, ParseError> {
    let mut b = AigBuilder::new();
    let mut map: Vec<Option<AigLit>> = vec![None; raw.max_var as usize + 1];
    map[0] = Some(AigLit::FALSE);
    let define = |map: &mut Vec<Option<AigLit>>, var: u32, lit: AigLit, ln: usize| {
        if map[var as usize].is_some() {
            return Err(ParseError::new(ln, format!("variable {var} defined twice")));
        }
        map[var as usize] = Some(lit);
        Ok(())
    };
    for &v in &raw.inputs {
        let lit = b.input();
        define(&mut map, v / 2, lit, 0)?;
    }
    let mut latch_ids = Vec::new();
    let mut free = Vec::new();
    for &(lit, _, init, ln) in &raw.latches {
        let (idx, l) = b.latch(init == RawInit::One);
        latch_ids.push(idx);
        if init == RawInit::Free {
            free.push((lit, l, ln));
        } else {
            define(&mut map, lit / 2, l, ln)?;
        }
    }
    if !free.is_empty() {
        let (z_idx, z) = b.latch(false);
        b.set_next(z_idx, AigLit::TRUE);
        let fresh: Vec<AigLit> = free.iter().map(|_| b.input()).collect();
        for (&(lit, l, ln), f) in free.iter().zip(fresh) {
            let value = b.mux(z, l, f);
            define(&mut map, lit / 2, value, ln)?;
        }
    }
    let resolve = |map: &Vec<Option<AigLit>>, lit: u32, ln: usize, what: &str| {
        match map[(lit / 2) as usize] {
            Some(base) => Ok(if lit & 1 == 1 { !base } else { base }),
            None => Err(ParseError::new(
                ln,
                format!("{what} refers to literal {lit} before its definition (gates must be topologically ordered)"),
            )),
        }
    };
    for &(lhs, r0, r1, ln) in &raw.ands {
        let a = resolve(&map, r0, ln, "and gate")?;
        let c = resolve(&map, r1, ln, "and gate")?;
        let g = b.and(a, c);
        define(&mut map, lhs / 2, g, ln)?;
    }
    for (k, &(_, next, _, ln)) in raw.latches.iter().enumerate() {
        let n = resolve(&map, next, ln, "latch")?;
        b.set_next(latch_ids[k], n);
    }
    let bad = resolve(&map, prop.0, prop.1, "property")?;
    b.set_bad(bad);
    for s in &raw.symbols {
        b.add_symbol(s.clone());
    }
    b.build().map_err(|m| ParseError::new(1, m))
}
