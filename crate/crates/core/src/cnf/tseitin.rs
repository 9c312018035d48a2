//! Parsimonious circuit-to-CNF compilation.
//!
//! Witness bits become variables `1..=W` in order. Gates are first folded
//! symbolically: constants propagate, `NOT` is absorbed into literal polarity,
//! degenerate binary gates (`a AND a`, `a XOR NOT a`, ...) collapse, and equal
//! gates are shared. Only gates in the output's cone then receive a variable,
//! numbered `W+1, W+2, ...` in gate order, with the usual defining clauses.
//! Every such variable is a function of the witness bits, so each accepting
//! witness assignment extends to exactly one model and every rejecting one to
//! none.

use std::collections::HashMap;

use super::{CnfFormula, Lit};
use crate::circuit::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sym {
    Const(bool),
    Lit { node: Node, negated: bool },
}

impl Sym {
    fn negate(self) -> Sym {
        match self {
            Sym::Const(c) => Sym::Const(!c),
            Sym::Lit { node, negated } => Sym::Lit {
                node,
                negated: !negated,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Definition {
    op: Op,
    a: Sym,
    b: Sym,
}

struct Folder {
    definitions: Vec<Definition>,
    shared: HashMap<Definition, usize>,
}

impl Folder {
    fn node(&mut self, op: Op, a: Sym, b: Sym) -> Sym {
        let (a, b) = if hash_key(a) <= hash_key(b) { (a, b) } else { (b, a) };
        let def = Definition { op, a, b };
        let idx = *self.shared.entry(def).or_insert_with(|| {
            self.definitions.push(def);
            self.definitions.len() - 1
        });
        Sym::Lit {
            node: Node::Gate(idx),
            negated: false,
        }
    }

    fn and(&mut self, a: Sym, b: Sym) -> Sym {
        match (a, b) {
            (Sym::Const(false), _) | (_, Sym::Const(false)) => Sym::Const(false),
            (Sym::Const(true), s) | (s, Sym::Const(true)) => s,
            _ if a == b => a,
            _ if a == b.negate() => Sym::Const(false),
            _ => self.node(Op::And, a, b),
        }
    }

    fn or(&mut self, a: Sym, b: Sym) -> Sym {
        match (a, b) {
            (Sym::Const(true), _) | (_, Sym::Const(true)) => Sym::Const(true),
            (Sym::Const(false), s) | (s, Sym::Const(false)) => s,
            _ if a == b => a,
            _ if a == b.negate() => Sym::Const(true),
            _ => self.node(Op::Or, a, b),
        }
    }

    fn xor(&mut self, a: Sym, b: Sym) -> Sym {
        match (a, b) {
            (Sym::Const(c), s) | (s, Sym::Const(c)) => {
                if c {
                    s.negate()
                } else {
                    s
                }
            }
            _ if a == b => Sym::Const(false),
            _ if a == b.negate() => Sym::Const(true),
            _ => self.node(Op::Xor, a, b),
        }
    }
}

fn hash_key(s: Sym) -> (u8, usize, bool) {
    match s {
        Sym::Const(c) => (0, 0, c),
        Sym::Lit {
            node: Node::Input(i),
            negated,
        } => (1, i, negated),
        Sym::Lit {
            node: Node::Gate(g),
            negated,
        } => (2, g, negated),
    }
}

/// Compiles `circuit` into a CNF whose model count equals the circuit's witness count.
pub fn tseitin_parsimonious(circuit: &Circuit) -> CnfFormula {
    let witnesses = circuit.input_count();
    let mut folder = Folder {
        definitions: Vec::new(),
        shared: HashMap::new(),
    };
    let mut syms: Vec<Sym> = Vec::with_capacity(circuit.gates().len());
    for gate in circuit.gates() {
        let s = match *gate {
            Gate::Input(i) => Sym::Lit {
                node: Node::Input(i),
                negated: false,
            },
            Gate::Const(c) => Sym::Const(c),
            Gate::Not(a) => syms[a.0].negate(),
            Gate::And(a, b) => folder.and(syms[a.0], syms[b.0]),
            Gate::Or(a, b) => folder.or(syms[a.0], syms[b.0]),
            Gate::Xor(a, b) => folder.xor(syms[a.0], syms[b.0]),
        };
        syms.push(s);
    }

    let output = syms[circuit.output().0];
    let (out_node, out_negated) = match output {
        Sym::Const(true) => {
            return CnfFormula::new(witnesses, witnesses, Vec::new()).expect("no clauses")
        }
        Sym::Const(false) => return CnfFormula::constant_false(witnesses, witnesses),
        Sym::Lit { node, negated } => (node, negated),
    };

    // Cone of influence. Definitions only reference earlier definitions, so a
    // single backward sweep suffices.
    let defs = &folder.definitions;
    let mut live = vec![false; defs.len()];
    if let Node::Gate(g) = out_node {
        live[g] = true;
    }
    for g in (0..defs.len()).rev() {
        if !live[g] {
            continue;
        }
        for s in [defs[g].a, defs[g].b] {
            if let Sym::Lit {
                node: Node::Gate(h), ..
            } = s
            {
                live[h] = true;
            }
        }
    }

    let mut var_of = vec![0usize; defs.len()];
    let mut next = witnesses;
    for (g, _) in live.iter().enumerate().filter(|(_, &l)| l) {
        next += 1;
        var_of[g] = next;
    }

    let lit = |s: Sym| -> Lit {
        match s {
            Sym::Const(_) => unreachable!("constants are folded away"),
            Sym::Lit { node, negated } => {
                let v = match node {
                    Node::Input(i) => i,
                    Node::Gate(g) => var_of[g],
                };
                if negated {
                    Lit::neg(v)
                } else {
                    Lit::pos(v)
                }
            }
        }
    };

    let mut clauses = Vec::new();
    for (g, def) in defs.iter().enumerate() {
        if !live[g] {
            continue;
        }
        let v = Lit::pos(var_of[g]);
        let (a, b) = (lit(def.a), lit(def.b));
        match def.op {
            Op::And => {
                clauses.push(vec![-v, a]);
                clauses.push(vec![-v, b]);
                clauses.push(vec![v, -a, -b]);
            }
            Op::Or => {
                clauses.push(vec![v, -a]);
                clauses.push(vec![v, -b]);
                clauses.push(vec![-v, a, b]);
            }
            Op::Xor => {
                clauses.push(vec![-v, a, b]);
                clauses.push(vec![-v, -a, -b]);
                clauses.push(vec![v, -a, b]);
                clauses.push(vec![v, a, -b]);
            }
        }
    }
    clauses.push(vec![lit(Sym::Lit {
        node: out_node,
        negated: out_negated,
    })]);

    CnfFormula::new(next, witnesses, clauses).expect("encoder emits well-formed clauses")
}
