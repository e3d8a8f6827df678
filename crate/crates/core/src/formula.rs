//! And-inverter graphs over latch variables.
//!
//! Interpolants, frame snapshots and blocking targets are kept in this form
//! until they are clausified for a particular solver. Construction does
//! constant propagation and structural hashing.

use std::collections::HashMap;
use std::io::{self, Write};
use std::ops::Not;

use crate::state::{Clause, Cube, LatchLit};

/// Reference to a node with an optional complement; node 0 is constant false.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge(u32);

impl Edge {
    pub const FALSE: Edge = Edge(0);
    pub const TRUE: Edge = Edge(1);

    fn new(node: u32, complement: bool) -> Edge {
        Edge(node << 1 | complement as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.node() == 0
    }
}

impl Not for Edge {
    type Output = Edge;
    fn not(self) -> Edge {
        Edge(self.0 ^ 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Node {
    False,
    Atom(usize),
    And(Edge, Edge),
}

#[derive(Clone, Debug)]
pub struct Formula {
    nodes: Vec<Node>,
    strash: HashMap<(Edge, Edge), u32>,
    atoms: HashMap<usize, u32>,
}

impl Default for Formula {
    fn default() -> Self {
        Formula::new()
    }
}

impl Formula {
    pub fn new() -> Formula {
        Formula {
            nodes: vec![Node::False],
            strash: HashMap::new(),
            atoms: HashMap::new(),
        }
    }

    pub fn node(&self, e: Edge) -> Node {
        self.nodes[e.node()]
    }

    pub fn node_by_id(&self, id: usize) -> Node {
        self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(b: bool) -> Edge {
        if b {
            Edge::TRUE
        } else {
            Edge::FALSE
        }
    }

    pub fn atom(&mut self, l: LatchLit) -> Edge {
        let id = match self.atoms.get(&l.latch()) {
            Some(&id) => id,
            None => {
                let id = self.nodes.len() as u32;
                self.nodes.push(Node::Atom(l.latch()));
                self.atoms.insert(l.latch(), id);
                id
            }
        };
        Edge::new(id, !l.is_positive())
    }

    pub fn and(&mut self, a: Edge, b: Edge) -> Edge {
        if a == Edge::FALSE || b == Edge::FALSE || a == !b {
            return Edge::FALSE;
        }
        if a == Edge::TRUE || a == b {
            return b;
        }
        if b == Edge::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&id) = self.strash.get(&key) {
            return Edge::new(id, false);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node::And(key.0, key.1));
        self.strash.insert(key, id);
        Edge::new(id, false)
    }

    pub fn or(&mut self, a: Edge, b: Edge) -> Edge {
        !self.and(!a, !b)
    }

    pub fn and_all<I: IntoIterator<Item = Edge>>(&mut self, items: I) -> Edge {
        let mut acc = Edge::TRUE;
        for e in items {
            acc = self.and(acc, e);
        }
        acc
    }

    pub fn or_all<I: IntoIterator<Item = Edge>>(&mut self, items: I) -> Edge {
        let mut acc = Edge::FALSE;
        for e in items {
            acc = self.or(acc, e);
        }
        acc
    }

    pub fn clause(&mut self, c: &Clause) -> Edge {
        let lits: Vec<Edge> = c.lits().iter().map(|&l| self.atom(l)).collect();
        self.or_all(lits)
    }

    pub fn cube(&mut self, c: &Cube) -> Edge {
        let lits: Vec<Edge> = c.lits().iter().map(|&l| self.atom(l)).collect();
        self.and_all(lits)
    }

    pub fn cnf<'c, I: IntoIterator<Item = &'c Clause>>(&mut self, clauses: I) -> Edge {
        let mut acc = Edge::TRUE;
        for c in clauses {
            let e = self.clause(c);
            acc = self.and(acc, e);
        }
        acc
    }

    /// Copies the cone of `root` in `other` into this formula.
    pub fn import(&mut self, other: &Formula, root: Edge) -> Edge {
        let mut map: HashMap<usize, Edge> = HashMap::new();
        map.insert(0, Edge::FALSE);
        for id in other.cone(root) {
            let e = match other.nodes[id] {
                Node::False => Edge::FALSE,
                Node::Atom(l) => self.atom(LatchLit::new(l, true)),
                Node::And(a, b) => {
                    let ea = lift(&map, a);
                    let eb = lift(&map, b);
                    self.and(ea, eb)
                }
            };
            map.insert(id, e);
        }
        lift(&map, root)
    }

    /// Node ids in the cone of `root`, children before parents.
    pub fn cone(&self, root: Edge) -> Vec<usize> {
        let mut mark = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(root.node(), false)];
        while let Some((id, done)) = stack.pop() {
            if done {
                order.push(id);
                continue;
            }
            if mark[id] {
                continue;
            }
            mark[id] = true;
            stack.push((id, true));
            if let Node::And(a, b) = self.nodes[id] {
                for c in [a.node(), b.node()] {
                    if !mark[c] {
                        stack.push((c, false));
                    }
                }
            }
        }
        order
    }

    /// Number of and-nodes in the cone of `root`.
    pub fn size(&self, root: Edge) -> usize {
        self.cone(root)
            .into_iter()
            .filter(|&id| matches!(self.nodes[id], Node::And(..)))
            .count()
    }

    /// Latches occurring in the cone of `root`, sorted.
    pub fn support(&self, root: Edge) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .cone(root)
            .into_iter()
            .filter_map(|id| match self.nodes[id] {
                Node::Atom(l) => Some(l),
                _ => None,
            })
            .collect();
        s.sort_unstable();
        s
    }

    pub fn eval(&self, root: Edge, state: &[bool]) -> bool {
        let mut val: HashMap<usize, bool> = HashMap::new();
        for id in self.cone(root) {
            let v = match self.nodes[id] {
                Node::False => false,
                Node::Atom(l) => state[l],
                Node::And(a, b) => {
                    (val[&a.node()] ^ a.is_complemented()) && (val[&b.node()] ^ b.is_complemented())
                }
            };
            val.insert(id, v);
        }
        val[&root.node()] ^ root.is_complemented()
    }

    /// Text dump: one line per node of the cone, then the root.
    pub fn write_text<W: Write>(&self, root: Edge, mut out: W) -> io::Result<()> {
        let name = |e: Edge| {
            let base = format!("n{}", e.node());
            if e.is_complemented() {
                format!("!{base}")
            } else {
                base
            }
        };
        for id in self.cone(root) {
            match self.nodes[id] {
                Node::False => writeln!(out, "n0 = false")?,
                Node::Atom(l) => writeln!(out, "n{id} = latch {l}")?,
                Node::And(a, b) => writeln!(out, "n{id} = {} & {}", name(a), name(b))?,
            }
        }
        writeln!(out, "root {}", name(root))
    }
}

fn lift(map: &HashMap<usize, Edge>, e: Edge) -> Edge {
    let base = map[&e.node()];
    if e.is_complemented() {
        !base
    } else {
        base
    }
}
