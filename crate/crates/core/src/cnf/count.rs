//! Exact model counting over all declared variables.
//!
//! [`count_models`] enumerates every assignment, 64 at a time. It is the
//! reference counter and is capped. [`count_models_dpll`] is an exact
//! branch-and-propagate counter for formulas beyond the enumeration cap;
//! whenever every clause is satisfied under a partial assignment it credits
//! `2^(unassigned variables)` models at once.

use rayon::prelude::*;

use super::CnfFormula;
use crate::error::{Error, Result};
use crate::DEFAULT_ENUMERATION_CAP;

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

pub fn count_models(f: &CnfFormula) -> Result<u64> {
    count_models_with_cap(f, DEFAULT_ENUMERATION_CAP)
}

pub fn count_models_with_cap(f: &CnfFormula, cap: usize) -> Result<u64> {
    let n = f.var_count();
    if n > cap {
        return Err(Error::ResourceLimit {
            what: "cnf variables",
            size: n as u64,
            cap: cap as u64,
        });
    }
    let words: u64 = if n <= 6 { 1 } else { 1 << (n - 6) };
    let lanes = if n < 6 { (1u64 << (1 << n)) - 1 } else { u64::MAX };
    let count = (0..words as usize)
        .into_par_iter()
        .with_min_len(256)
        .map_init(
            || vec![0u64; n],
            |vars, word| {
                let word = word as u64;
                for (v, slot) in vars.iter_mut().enumerate() {
                    let shift = n - 1 - v;
                    *slot = if shift < 6 {
                        LANE_PATTERNS[shift]
                    } else if (word >> (shift - 6)) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    };
                }
                let mut sat = lanes;
                for clause in f.clauses() {
                    let mut any = 0u64;
                    for &lit in clause {
                        let m = vars[lit.var() - 1];
                        any |= if lit.is_positive() { m } else { !m };
                    }
                    sat &= any;
                    if sat == 0 {
                        break;
                    }
                }
                u64::from(sat.count_ones())
            },
        )
        .sum();
    Ok(count)
}

/// Exact model count with no variable cap. Fails only if the count overflows `u64`.
pub fn count_models_dpll(f: &CnfFormula) -> Result<u64> {
    Dpll::new(f, u64::MAX).run()
}

/// Counts models but stops once `limit` are found. The result is exact when
/// below `limit` and equals `limit` otherwise.
pub fn count_models_bounded(f: &CnfFormula, limit: u64) -> Result<u64> {
    Dpll::new(f, limit).run().map(|c| c.min(limit))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unset,
    True,
    False,
}

struct Dpll<'a> {
    clauses: &'a [Vec<super::Lit>],
    values: Vec<Value>,
    trail: Vec<usize>,
    count: u64,
    limit: u64,
}

enum Scan {
    Conflict,
    Satisfied,
    Branch(usize),
}

impl<'a> Dpll<'a> {
    fn new(f: &'a CnfFormula, limit: u64) -> Self {
        Dpll {
            clauses: f.clauses(),
            values: vec![Value::Unset; f.var_count() + 1],
            trail: Vec::new(),
            count: 0,
            limit,
        }
    }

    fn run(mut self) -> Result<u64> {
        self.search()?;
        Ok(self.count)
    }

    fn lit_value(&self, lit: super::Lit) -> Value {
        match (self.values[lit.var()], lit.is_positive()) {
            (Value::Unset, _) => Value::Unset,
            (Value::True, true) | (Value::False, false) => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, lit: super::Lit) {
        self.values[lit.var()] = if lit.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.trail.push(lit.var());
    }

    fn undo_to(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.values[v] = Value::Unset;
        }
    }

    /// Unit propagation to fixpoint, then a verdict on the residual formula.
    fn propagate(&mut self) -> Scan {
        loop {
            let mut changed = false;
            let mut branch: Option<usize> = None;
            for clause in self.clauses {
                let mut satisfied = false;
                let mut unset = None;
                let mut unset_count = 0;
                for &lit in clause {
                    match self.lit_value(lit) {
                        Value::True => {
                            satisfied = true;
                            break;
                        }
                        Value::Unset => {
                            unset_count += 1;
                            unset = Some(lit);
                        }
                        Value::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (unset_count, unset) {
                    (0, _) => return Scan::Conflict,
                    (1, Some(lit)) => {
                        self.assign(lit);
                        changed = true;
                    }
                    _ => {
                        let lowest = clause
                            .iter()
                            .filter(|l| self.values[l.var()] == Value::Unset)
                            .map(|l| l.var())
                            .min()
                            .expect("unset literal present");
                        branch = Some(branch.map_or(lowest, |b| b.min(lowest)));
                    }
                }
            }
            if !changed {
                return match branch {
                    Some(v) => Scan::Branch(v),
                    None => Scan::Satisfied,
                };
            }
        }
    }

    fn search(&mut self) -> Result<()> {
        if self.count >= self.limit {
            return Ok(());
        }
        let mark = self.trail.len();
        match self.propagate() {
            Scan::Conflict => {}
            Scan::Satisfied => {
                let free = self.values[1..]
                    .iter()
                    .filter(|&&v| v == Value::Unset)
                    .count();
                let models = 1u64.checked_shl(free as u32).filter(|_| free < 64).ok_or(
                    Error::ResourceLimit {
                        what: "model count bits",
                        size: free as u64,
                        cap: 63,
                    },
                )?;
                self.count = self.count.saturating_add(models);
            }
            Scan::Branch(v) => {
                for lit in [super::Lit::neg(v), super::Lit::pos(v)] {
                    let inner = self.trail.len();
                    self.assign(lit);
                    self.search()?;
                    self.undo_to(inner);
                    if self.count >= self.limit {
                        break;
                    }
                }
            }
        }
        self.undo_to(mark);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Lit;

    fn formula(vars: usize, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula::new(
            vars,
            vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&l| Lit::new(l).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn small_hand_counted_formulas() {
        assert_eq!(count_models(&CnfFormula::constant_false(3, 3)), Ok(0));
        assert_eq!(count_models(&formula(2, &[])), Ok(4));
    }

    #[test]
    fn both_counters_agree_on_small_cases() {
        let cases = [
            formula(3, &[&[1, -2], &[3]]),
            formula(3, &[&[1, 2, 3]]),
            formula(4, &[&[1], &[-1]]),
            formula(7, &[&[1, 7], &[-2, -7], &[3, 4, 5]]),
            formula(9, &[&[1, 2], &[-1, -2], &[8, 9]]),
            formula(0, &[]),
            CnfFormula::constant_false(5, 2),
        ];
        for f in &cases {
            assert_eq!(count_models(f), count_models_dpll(f), "{f:?}");
        }
    }

    #[test]
    fn bounded_stops_at_limit() {
        let f = formula(10, &[&[1, 2]]);
        assert_eq!(count_models_dpll(&f), Ok(768));
        assert_eq!(count_models_bounded(&f, 2), Ok(2));
        assert_eq!(count_models_bounded(&formula(2, &[&[1], &[2]]), 2), Ok(1));
    }

    #[test]
    fn cap_is_enforced() {
        let f = formula(25, &[]);
        assert!(count_models(&f).unwrap_err().is_resource_limit());
        assert_eq!(count_models_dpll(&f), Ok(1 << 25));
    }

    #[test]
    fn unconstrained_variables_double_the_count() {
        let base = formula(3, &[&[1, -2], &[2, 3]]);
        let m = count_models(&base).unwrap();
        for extra in 1..=4 {
            let padded = CnfFormula::new(3 + extra, 3, base.clauses().to_vec()).unwrap();
            assert_eq!(count_models(&padded), Ok(m << extra));
        }
    }
}
