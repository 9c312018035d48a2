//! CNF formulas: representation, the parsimonious circuit encoder, exact model
//! counting, and DIMACS serialization.

mod count;
mod dimacs;
mod tseitin;

use std::fmt;

use crate::error::{Error, Result};

pub use count::{count_models, count_models_bounded, count_models_dpll, count_models_with_cap};
pub use dimacs::{from_dimacs, to_dimacs};
pub use tseitin::tseitin_parsimonious;

/// A signed DIMACS literal, never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(value: i32) -> Result<Self> {
        if value == 0 {
            return Err(Error::construction("literal 0"));
        }
        Ok(Lit(value))
    }

    pub fn pos(var: usize) -> Self {
        Lit(i32::try_from(var).expect("variable index fits i32"))
    }

    pub fn neg(var: usize) -> Self {
        -Lit::pos(var)
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn value(self) -> i32 {
        self.0
    }
}

impl std::ops::Neg for Lit {
    type Output = Lit;

    fn neg(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A CNF formula whose first `witness_var_count` variables are witness bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    var_count: usize,
    witness_var_count: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    /// Validates variable ranges and rejects tautological clauses.
    pub fn new(var_count: usize, witness_var_count: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        if witness_var_count > var_count {
            return Err(Error::construction(format!(
                "{witness_var_count} witness variables but only {var_count} variables"
            )));
        }
        for (idx, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit.var() > var_count {
                    return Err(Error::construction(format!(
                        "clause {idx}: literal {lit} exceeds {var_count} variables"
                    )));
                }
                if clause.contains(&-lit) {
                    return Err(Error::construction(format!(
                        "clause {idx} is tautological in variable {}",
                        lit.var()
                    )));
                }
            }
        }
        Ok(CnfFormula {
            var_count,
            witness_var_count,
            clauses,
        })
    }

    /// The canonical unsatisfiable formula: one empty clause.
    pub fn constant_false(var_count: usize, witness_var_count: usize) -> Self {
        assert!(witness_var_count <= var_count);
        CnfFormula {
            var_count,
            witness_var_count,
            clauses: vec![Vec::new()],
        }
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn witness_var_count(&self) -> usize {
        self.witness_var_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// True if the assignment (indexed by variable - 1) satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|&lit| assignment[lit.var() - 1] == lit.is_positive())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::new(x).unwrap()).collect()
    }

    #[test]
    fn rejects_bad_formulas() {
        assert!(CnfFormula::new(2, 3, vec![]).is_err());
        assert!(CnfFormula::new(2, 2, vec![lits(&[1, 3])]).is_err());
        assert!(CnfFormula::new(2, 2, vec![lits(&[1, -1])]).is_err());
        assert!(CnfFormula::new(2, 2, vec![lits(&[1, 1, -2])]).is_ok());
        assert!(Lit::new(0).is_err());
    }

    #[test]
    fn literal_accessors() {
        let l = Lit::neg(4);
        assert_eq!(l.var(), 4);
        assert!(!l.is_positive());
        assert_eq!(-l, Lit::pos(4));
        assert_eq!(l.to_string(), "-4");
    }
}
