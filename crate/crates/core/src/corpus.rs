//! Seeded circuit generators for parsimony checks and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::census::build_j_circuit;
use crate::circuit::{build_bit_equals, build_less_than, conjoin, Circuit, CircuitBuilder, GateId};
use crate::cnf::tseitin_parsimonious;
use crate::machines::{library, Decision, FewLanguage, PolyBound};

/// A random circuit over `input_count` inputs with `gate_count` operator
/// gates. Each input is wired in with probability 3/4, so some witness bits
/// may stay unreferenced.
pub fn random_circuit(rng: &mut impl Rng, input_count: usize, gate_count: usize) -> Circuit {
    let mut b = CircuitBuilder::new(input_count);
    let mut pool: Vec<GateId> = (1..=input_count)
        .filter(|_| rng.random_ratio(3, 4))
        .map(|i| b.input(i).expect("in range"))
        .collect();
    if pool.is_empty() || rng.random_ratio(1, 8) {
        let c = rng.random_bool(0.5);
        pool.push(b.constant(c));
    }
    for _ in 0..gate_count {
        let a = pool[rng.random_range(0..pool.len())];
        let c = pool[rng.random_range(0..pool.len())];
        let g = match rng.random_range(0..4) {
            0 => b.not(a),
            1 => b.and(a, c),
            2 => b.or(a, c),
            _ => b.xor(a, c),
        };
        pool.push(g);
    }
    let out = *pool.last().expect("nonempty pool");
    b.finish(out)
}

/// Hand-picked circuits: constants, single gates, comparators, conjunctions,
/// small J-instances, and circuits with unreferenced inputs.
pub fn structured_circuits() -> Vec<Circuit> {
    let mut out = Vec::new();
    for n in 0..=3 {
        out.push(Circuit::constant(n, false));
        out.push(Circuit::constant(n, true));
    }
    for n in 2..=4 {
        let ops: [fn(&mut CircuitBuilder, GateId, GateId) -> GateId; 3] =
            [CircuitBuilder::and, CircuitBuilder::or, CircuitBuilder::xor];
        for op in ops {
            let mut b = CircuitBuilder::new(n);
            let (x, y) = (b.input(1).expect("in range"), b.input(2).expect("in range"));
            let g = op(&mut b, x, y);
            out.push(b.finish(g));
        }
        let mut b = CircuitBuilder::new(n);
        let x = b.input(n).expect("in range");
        let g = b.not(x);
        out.push(b.finish(g));
    }
    for width in 1..=2 {
        let a: Vec<usize> = (1..=width).collect();
        let c: Vec<usize> = (width + 1..=2 * width).collect();
        out.push(build_less_than(2 * width, &a, &c).expect("valid widths"));
        out.push(build_less_than(2 * width + 1, &c, &a).expect("valid widths"));
    }
    for value in [false, true] {
        out.push(build_bit_equals(3, 2, value).expect("in range"));
        let lt = build_less_than(4, &[1, 2], &[3, 4]).expect("valid widths");
        let eq = build_bit_equals(4, 3, value).expect("in range");
        out.push(conjoin(4, &[lt, eq]).expect("same inputs"));
    }
    out.push(conjoin(3, &[]).expect("empty conjunction"));
    out.push(library::exactly_one(4));

    let x: BitString = "1".parse().expect("bits");
    let xor2 = library::xor2();
    for (c, j, k, b) in [(1, 1, 1, false), (1, 1, 2, true), (2, 1, 1, false), (2, 2, 2, false)] {
        out.push(build_j_circuit(&xor2, &x, c, j, k, b).expect("in range"));
    }
    let pinned = library::exact1("10".parse().expect("bits")).expect("well-formed");
    for (k, b) in [(1, true), (2, true)] {
        out.push(build_j_circuit(&pinned, &x, 1, 1, k, b).expect("in range"));
    }
    out
}

/// `structured_circuits()` plus seeded random circuits, keeping only circuits
/// with at most `max_witness_bits` inputs whose encoding has at most
/// `max_cnf_vars` variables, until `count` circuits are collected.
pub fn parsimony_corpus(seed: u64, count: usize, max_witness_bits: usize, max_cnf_vars: usize) -> Vec<Circuit> {
    let fits = |c: &Circuit| {
        c.input_count() <= max_witness_bits && tseitin_parsimonious(c).var_count() <= max_cnf_vars
    };
    let mut out: Vec<Circuit> = structured_circuits().into_iter().filter(|c| fits(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let inputs = rng.random_range(1..=max_witness_bits);
        let gates = rng.random_range(1..=8);
        let c = random_circuit(&mut rng, inputs, gates);
        if fits(&c) {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_bounded() {
        let a = parsimony_corpus(7, 60, 10, 14);
        let b = parsimony_corpus(7, 60, 10, 14);
        assert_eq!(a, b);
        assert!(a.len() >= 60);
        assert!(a
            .iter()
            .all(|c| c.input_count() <= 10 && tseitin_parsimonious(c).var_count() <= 14));
    }

    #[test]
    fn structured_circuits_fit_the_parsimony_bounds() {
        let all = structured_circuits();
        let kept = parsimony_corpus(0, 0, 10, 14);
        assert_eq!(kept.len(), all.len());
    }
}

/// Library machines paired with inputs on which the census promise holds,
/// with `p(|x|) <= 8` and `q(|x|) <= 4`.
pub fn promise_instances() -> Vec<(FewLanguage, Vec<BitString>)> {
    let xs = |list: &[&str]| -> Vec<BitString> { list.iter().map(|s| s.parse().expect("bits")).collect() };
    let five = xs(&["0", "1", "01", "110", "1011"]);
    vec![
        (library::const0(2).expect("well-formed"), five.clone()),
        (library::exact1("10".parse().expect("bits")).expect("well-formed"), five.clone()),
        (
            library::exact1("01101100".parse().expect("bits")).expect("well-formed"),
            five.clone(),
        ),
        (library::xor2(), five.clone()),
        (library::xor2().with_decision(Decision::nonzero()), five),
        (library::onehot(), xs(&["1", "0", "01", "101", "0110", "1111"])),
        (
            library::onehot().with_decision(Decision::parity()),
            xs(&["10", "011", "1001", "0000", "1"]),
        ),
        (
            library::subset_sum(None),
            xs(&["10001", "00000", "1100", "10010", "11110001", "111"]),
        ),
    ]
}

/// Inputs on which a library machine has more accepting paths than its census bound.
pub fn promise_violations() -> Vec<(FewLanguage, BitString)> {
    vec![
        (library::subset_sum(None), "11111".parse().expect("bits")),
        (library::subset_sum(None), "10111001".parse().expect("bits")),
        (
            library::xor2().with_census_bound(PolyBound::constant(1)),
            "0110".parse().expect("bits"),
        ),
    ]
}
