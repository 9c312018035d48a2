//! Parsimony and serialization properties of the CNF encoder, checked against
//! an independent per-assignment circuit interpreter.

use census_core::circuit::{build_less_than, conjoin};
use census_core::cnf::{count_models, count_models_dpll, from_dimacs, to_dimacs};
use census_core::corpus::{parsimony_corpus, random_circuit};
use census_core::{tseitin_parsimonious, BitString, Circuit, CnfFormula, Gate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recursive interpretation of the output gate for one assignment, given as
/// an integer whose most significant of `n` bits is input 1.
fn naive_eval(c: &Circuit, assignment: u64, gate: usize) -> bool {
    let n = c.input_count();
    match c.gates()[gate] {
        Gate::Input(i) => (assignment >> (n - i)) & 1 == 1,
        Gate::Const(v) => v,
        Gate::Not(a) => !naive_eval(c, assignment, a.0),
        Gate::And(a, b) => naive_eval(c, assignment, a.0) && naive_eval(c, assignment, b.0),
        Gate::Or(a, b) => naive_eval(c, assignment, a.0) || naive_eval(c, assignment, b.0),
        Gate::Xor(a, b) => naive_eval(c, assignment, a.0) != naive_eval(c, assignment, b.0),
    }
}

fn naive_count(c: &Circuit) -> u64 {
    (0..1u64 << c.input_count())
        .filter(|&a| naive_eval(c, a, c.output().0))
        .count() as u64
}

fn naive_models(f: &CnfFormula) -> u64 {
    let n = f.var_count();
    (0..1u64 << n)
        .filter(|&a| {
            let assignment: Vec<bool> = (0..n).map(|v| (a >> v) & 1 == 1).collect();
            f.is_satisfied_by(&assignment)
        })
        .count() as u64
}

#[test]
fn corpus_is_parsimonious() {
    let corpus = parsimony_corpus(2024, 250, 10, 14);
    assert!(corpus.len() >= 200);
    for c in &corpus {
        let f = tseitin_parsimonious(c);
        let witnesses = c.count_witnesses().unwrap();
        assert_eq!(witnesses, naive_count(c));
        assert_eq!(count_models(&f), Ok(witnesses), "{c:?}");
        assert_eq!(f.witness_var_count(), c.input_count());
    }
}

#[test]
fn circuit_counter_agrees_with_naive_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = 1 + (rand::Rng::random_range(&mut rng, 0..12usize));
        let gates = rand::Rng::random_range(&mut rng, 1..20usize);
        let c = random_circuit(&mut rng, n, gates);
        assert_eq!(c.count_witnesses(), Ok(naive_count(&c)));
    }
}

#[test]
fn less_than_matches_integer_comparison() {
    for width in 1..=4usize {
        let a: Vec<usize> = (1..=width).collect();
        let b: Vec<usize> = (width + 1..=2 * width).collect();
        let lt = build_less_than(2 * width, &a, &b).unwrap();
        for x in 0..1u64 << width {
            for y in 0..1u64 << width {
                let w = BitString::from_u64((x << width) | y, 2 * width);
                assert_eq!(lt.evaluate(&w), Ok(x < y), "width {width}: {x} < {y}");
            }
        }
    }
}

#[test]
fn evaluate_is_repeatable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = random_circuit(&mut rng, 6, 15);
    for a in 0..64 {
        let w = BitString::from_u64(a, 6);
        let first = c.evaluate(&w).unwrap();
        assert_eq!(c.evaluate(&w), Ok(first));
        assert_eq!(first, naive_eval(&c, a, c.output().0));
    }
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (any::<u64>(), 1usize..=8, 1usize..=12).prop_map(|(seed, n, gates)| {
        random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n, gates)
    })
}

proptest! {
    #[test]
    fn encoding_preserves_counts(c in arb_circuit()) {
        let f = tseitin_parsimonious(&c);
        let witnesses = naive_count(&c);
        prop_assert_eq!(count_models_dpll(&f).unwrap(), witnesses);
        if f.var_count() <= 16 {
            prop_assert_eq!(naive_models(&f), witnesses);
            prop_assert_eq!(count_models(&f).unwrap(), witnesses);
        }
    }

    #[test]
    fn each_accepting_witness_extends_to_one_model(c in arb_circuit()) {
        let f = tseitin_parsimonious(&c);
        prop_assume!(f.var_count() <= 16);
        let n = f.var_count();
        let w = c.input_count();
        let mut extensions = vec![0u32; 1 << w];
        for a in 0..1u64 << n {
            let assignment: Vec<bool> = (0..n).map(|v| (a >> (n - 1 - v)) & 1 == 1).collect();
            if f.is_satisfied_by(&assignment) {
                extensions[(a >> (n - w)) as usize] += 1;
            }
        }
        for (witness, &count) in extensions.iter().enumerate() {
            let accepted = naive_eval(&c, witness as u64, c.output().0);
            prop_assert_eq!(count, u32::from(accepted));
        }
    }

    #[test]
    fn encoding_is_deterministic(c in arb_circuit()) {
        prop_assert_eq!(to_dimacs(&tseitin_parsimonious(&c)), to_dimacs(&tseitin_parsimonious(&c.clone())));
    }

    #[test]
    fn dimacs_round_trip(c in arb_circuit(), extra in 0usize..3) {
        let f = tseitin_parsimonious(&c);
        let padded = CnfFormula::new(f.var_count() + extra, f.witness_var_count(), f.clauses().to_vec()).unwrap();
        prop_assert_eq!(from_dimacs(&to_dimacs(&padded)).unwrap(), padded);
    }

    #[test]
    fn unconstrained_variables_scale_by_powers_of_two(c in arb_circuit(), extra in 0usize..4) {
        let f = tseitin_parsimonious(&c);
        prop_assume!(f.var_count() + extra <= 18);
        let padded = CnfFormula::new(f.var_count() + extra, f.witness_var_count(), f.clauses().to_vec()).unwrap();
        prop_assert_eq!(count_models(&padded).unwrap(), count_models(&f).unwrap() << extra);
    }

    #[test]
    fn conjoin_ignores_fragment_order(seeds in proptest::collection::vec(any::<u64>(), 0..4), rot in 0usize..4) {
        let fragments: Vec<Circuit> = seeds
            .iter()
            .map(|&s| random_circuit(&mut ChaCha8Rng::seed_from_u64(s), 4, 6))
            .collect();
        let mut rotated = fragments.clone();
        if !rotated.is_empty() {
            let r = rot % rotated.len();
            rotated.rotate_left(r);
        }
        let mut reversed = fragments.clone();
        reversed.reverse();
        let a = conjoin(4, &fragments).unwrap();
        prop_assert_eq!(a.accepting_assignments().unwrap(), conjoin(4, &rotated).unwrap().accepting_assignments().unwrap());
        prop_assert_eq!(a.accepting_assignments().unwrap(), conjoin(4, &reversed).unwrap().accepting_assignments().unwrap());
        // associativity: conjoin(conjoin(prefix), rest)
        if fragments.len() >= 2 {
            let inner = conjoin(4, &fragments[..2]).unwrap();
            let mut nested = vec![inner];
            nested.extend_from_slice(&fragments[2..]);
            prop_assert_eq!(a.count_witnesses().unwrap(), conjoin(4, &nested).unwrap().count_witnesses().unwrap());
        }
    }
}
