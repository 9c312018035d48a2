//! The USAT_Q oracle.
//!
//! A formula with no model is answered no and a formula with exactly one
//! model is answered yes, whatever `Q` is. Only formulas with two or more
//! models are handed to the predicate `Q`, which sees the formula's canonical
//! DIMACS bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hasher;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use rayon::prelude::*;
use siphasher::sip::SipHasher13;

use crate::census::{AnswerMap, BatchOracle, Query};
use crate::cnf::{count_models_bounded, count_models_with_cap, to_dimacs, CnfFormula};
use crate::error::{Error, Result};

/// The free predicate `Q`. Every kind is a deterministic function of the
/// formula's canonical DIMACS bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QPredicate {
    ConstNo,
    ConstYes,
    /// Low bit of SipHash-1-3 keyed with `(seed, 0)` over the DIMACS bytes.
    SeededRandom(u64),
    /// Yes exactly on unsatisfiable formulas.
    AntiSat,
    /// Yes exactly on the listed DIMACS byte strings.
    MemberList(BTreeSet<Vec<u8>>),
}

impl QPredicate {
    /// `models` is the formula's model count, possibly truncated to any value >= 2.
    pub fn decide(&self, dimacs: &[u8], models: u64) -> bool {
        match self {
            QPredicate::ConstNo => false,
            QPredicate::ConstYes => true,
            QPredicate::SeededRandom(seed) => {
                let mut h = SipHasher13::new_with_keys(*seed, 0);
                h.write(dimacs);
                h.finish() & 1 == 1
            }
            QPredicate::AntiSat => models == 0,
            QPredicate::MemberList(set) => set.contains(dimacs),
        }
    }

    pub fn by_name(name: &str, seed: u64) -> Option<Self> {
        match name {
            "const-no" => Some(QPredicate::ConstNo),
            "const-yes" => Some(QPredicate::ConstYes),
            "anti-sat" => Some(QPredicate::AntiSat),
            "random" => Some(QPredicate::SeededRandom(seed)),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 4] = ["const-no", "const-yes", "anti-sat", "random"];

    /// const-no, const-yes, anti-sat and one seeded predicate per seed.
    pub fn family(seeds: &[u64]) -> Vec<QPredicate> {
        let mut out = vec![QPredicate::ConstNo, QPredicate::ConstYes, QPredicate::AntiSat];
        out.extend(seeds.iter().map(|&s| QPredicate::SeededRandom(s)));
        out
    }
}

impl fmt::Display for QPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QPredicate::ConstNo => f.write_str("const-no"),
            QPredicate::ConstYes => f.write_str("const-yes"),
            QPredicate::SeededRandom(s) => write!(f, "random({s})"),
            QPredicate::AntiSat => f.write_str("anti-sat"),
            QPredicate::MemberList(set) => write!(f, "member-list({})", set.len()),
        }
    }
}

/// How the oracle counts models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterBackend {
    /// Exhaustive enumeration, failing above `cap` variables.
    Enumerate { cap: usize },
    /// Branch-and-propagate counting with no variable cap.
    Dpll,
    /// Enumeration up to `enumerate_up_to` variables, DPLL above.
    Auto { enumerate_up_to: usize },
}

impl Default for CounterBackend {
    fn default() -> Self {
        CounterBackend::Auto { enumerate_up_to: 16 }
    }
}

impl CounterBackend {
    /// `min(model count, limit)`.
    pub fn count_up_to(&self, f: &CnfFormula, limit: u64) -> Result<u64> {
        match *self {
            CounterBackend::Enumerate { cap } => Ok(count_models_with_cap(f, cap)?.min(limit)),
            CounterBackend::Dpll => count_models_bounded(f, limit),
            CounterBackend::Auto { enumerate_up_to } if f.var_count() <= enumerate_up_to => {
                Ok(count_models_with_cap(f, enumerate_up_to)?.min(limit))
            }
            CounterBackend::Auto { .. } => count_models_bounded(f, limit),
        }
    }
}

/// An external exact model counter: reads DIMACS on stdin and prints the
/// model count as a decimal integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCounter {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalCounter {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        ExternalCounter {
            program: program.into(),
            args,
        }
    }

    pub fn count(&self, dimacs: &[u8]) -> Result<u64> {
        let ext = |e: std::io::Error| Error::External(format!("{}: {e}", self.program.display()));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(ext)?;
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(dimacs)
            .map_err(ext)?;
        let output = child.wait_with_output().map_err(ext)?;
        if !output.status.success() {
            return Err(Error::External(format!(
                "{} exited with {}",
                self.program.display(),
                output.status
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        text.trim()
            .parse()
            .map_err(|_| Error::External(format!("unparseable count {:?}", text.trim())))
    }
}

/// The USAT_Q verdict on one formula.
pub fn usatq_answer(f: &CnfFormula, q: &QPredicate, backend: &CounterBackend) -> Result<bool> {
    let models = backend.count_up_to(f, 2)?;
    Ok(match models {
        0 => false,
        1 => true,
        _ => q.decide(&to_dimacs(f), models),
    })
}

/// One submitted batch: query ids in submission order with their verdicts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchRecord {
    pub ids: Vec<String>,
    pub verdicts: Vec<bool>,
}

/// Append-only record of every batch an oracle has answered.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleLog {
    batches: Vec<BatchRecord>,
}

impl OracleLog {
    pub fn batches(&self) -> &[BatchRecord] {
        &self.batches
    }

    fn append(&mut self, record: BatchRecord) {
        self.batches.push(record);
    }
}

/// Answers every query (in parallel), then logs the batch as one record.
pub fn answer_batch(
    queries: &[Query],
    q: &QPredicate,
    backend: &CounterBackend,
    cross_check: Option<&ExternalCounter>,
    log: &mut OracleLog,
) -> Result<AnswerMap> {
    let verdicts = queries
        .par_iter()
        .map(|query| {
            let annotate = |e: Error| Error::Query {
                id: query.canonical_id.clone(),
                source: Box::new(e),
            };
            let verdict = usatq_answer(&query.formula, q, backend).map_err(annotate)?;
            if let Some(external) = cross_check {
                let internal = backend.count_up_to(&query.formula, 2).map_err(annotate)?;
                let theirs = external.count(&to_dimacs(&query.formula)).map_err(annotate)?;
                if theirs.min(2) != internal {
                    return Err(annotate(Error::CrossCheck {
                        internal,
                        external: theirs,
                    }));
                }
            }
            Ok(verdict)
        })
        .collect::<Result<Vec<bool>>>()?;

    let mut answers = AnswerMap::new();
    for (query, &verdict) in queries.iter().zip(&verdicts) {
        if answers.insert(query.key, verdict).is_some() {
            return Err(Error::Protocol(format!("duplicate query {}", query.key)));
        }
    }
    log.append(BatchRecord {
        ids: queries.iter().map(|q| q.canonical_id.clone()).collect(),
        verdicts,
    });
    Ok(answers)
}

/// A USAT_Q oracle with a fixed `Q`, a counting backend and a call log.
#[derive(Debug, Clone)]
pub struct UsatOracle {
    q: QPredicate,
    backend: CounterBackend,
    cross_check: Option<ExternalCounter>,
    log: OracleLog,
}

impl UsatOracle {
    pub fn new(q: QPredicate) -> Self {
        UsatOracle {
            q,
            backend: CounterBackend::default(),
            cross_check: None,
            log: OracleLog::default(),
        }
    }

    pub fn with_backend(mut self, backend: CounterBackend) -> Self {
        self.backend = backend;
        self
    }

    /// Cross-checks every verdict's model count against an external counter.
    pub fn with_cross_check(mut self, counter: ExternalCounter) -> Self {
        self.cross_check = Some(counter);
        self
    }

    pub fn predicate(&self) -> &QPredicate {
        &self.q
    }

    pub fn log(&self) -> &OracleLog {
        &self.log
    }
}

impl BatchOracle for UsatOracle {
    fn answer_batch(&mut self, queries: &[Query]) -> Result<AnswerMap> {
        answer_batch(
            queries,
            &self.q,
            &self.backend,
            self.cross_check.as_ref(),
            &mut self.log,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::census::{generate_queries, Limits};
    use crate::cnf::{count_models_dpll, Lit};
    use crate::machines::library::xor2;

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

    fn family() -> Vec<QPredicate> {
        let mut f = QPredicate::family(&[1, 2, 3]);
        f.push(QPredicate::MemberList(BTreeSet::new()));
        f
    }

    #[test]
    fn promise_region_ignores_q() {
        let unsat = CnfFormula::constant_false(2, 2);
        let unique = formula(2, &[&[1], &[-2]]);
        for q in family() {
            for backend in [CounterBackend::Dpll, CounterBackend::Enumerate { cap: 24 }, CounterBackend::default()] {
                assert_eq!(usatq_answer(&unsat, &q, &backend), Ok(false));
                assert_eq!(usatq_answer(&unique, &q, &backend), Ok(true));
            }
        }
    }

    #[test]
    fn q_decides_the_rest() {
        let two = formula(2, &[&[1]]);
        let b = CounterBackend::default();
        assert_eq!(usatq_answer(&two, &QPredicate::ConstYes, &b), Ok(true));
        assert_eq!(usatq_answer(&two, &QPredicate::ConstNo, &b), Ok(false));
        assert_eq!(usatq_answer(&two, &QPredicate::AntiSat, &b), Ok(false));
        let listed = QPredicate::MemberList([to_dimacs(&two)].into_iter().collect());
        assert_eq!(usatq_answer(&two, &listed, &b), Ok(true));
    }

    #[test]
    fn anti_sat_is_unsatisfiability() {
        let q = QPredicate::AntiSat;
        assert!(q.decide(b"", 0));
        assert!(!q.decide(b"", 1));
        assert!(!q.decide(b"", 5));
    }

    #[test]
    fn seeded_random_is_replayable() {
        let bytes = b"c witness 2\np cnf 2 1\n1 0\n";
        for seed in 0..16 {
            let q = QPredicate::SeededRandom(seed);
            assert_eq!(q.decide(bytes, 2), q.decide(bytes, 2));
        }
        // different seeds eventually disagree
        let verdicts: BTreeSet<bool> = (0..16).map(|s| QPredicate::SeededRandom(s).decide(bytes, 2)).collect();
        assert_eq!(verdicts.len(), 2);
    }

    #[test]
    fn enumerate_backend_respects_cap() {
        let wide = formula(20, &[]);
        let err = usatq_answer(&wide, &QPredicate::ConstNo, &CounterBackend::Enumerate { cap: 10 }).unwrap_err();
        assert!(err.is_resource_limit());
        assert_eq!(usatq_answer(&wide, &QPredicate::ConstNo, &CounterBackend::Dpll), Ok(false));
    }

    #[test]
    fn empty_batch_is_logged() {
        let mut oracle = UsatOracle::new(QPredicate::ConstYes);
        let answers = oracle.answer_batch(&[]).unwrap();
        assert!(answers.is_empty());
        assert_eq!(oracle.log().batches(), &[BatchRecord::default()]);
    }

    #[test]
    fn xor2_battery_answers() {
        let x = BitString::new(vec![true]);
        let queries = generate_queries(&xor2(), &x, &Limits::default()).unwrap();
        assert_eq!(queries.len(), 12);
        let mut runs = Vec::new();
        for q in family() {
            let mut oracle = UsatOracle::new(q);
            runs.push(oracle.answer_batch(&queries).unwrap());
            assert_eq!(oracle.log().batches().len(), 1);
            assert_eq!(oracle.log().batches()[0].ids.len(), 12);
        }
        for query in &queries {
            let m = count_models_dpll(&query.formula).unwrap();
            let verdicts: BTreeSet<bool> = runs.iter().map(|a| a[&query.key]).collect();
            if m <= 1 {
                assert_eq!(verdicts, [m == 1].into_iter().collect(), "{}", query.key);
            }
            if query.key.c == 2 {
                // paths 01 and 10
                let bit = if query.key.j == 1 { query.key.k == 2 } else { query.key.k == 1 };
                assert_eq!(runs[0][&query.key], query.key.b == bit);
            }
        }
        // at c = 1 every probe has exactly one model: 01 or 10 each match one b
        assert!(queries.iter().filter(|q| q.key.c == 1).all(|q| runs[0][&q.key]));
    }

    #[test]
    fn duplicate_queries_are_a_protocol_error() {
        let x = BitString::new(vec![true]);
        let mut queries = generate_queries(&xor2(), &x, &Limits::default()).unwrap();
        queries.push(queries[0].clone());
        let mut oracle = UsatOracle::new(QPredicate::ConstNo);
        assert!(matches!(oracle.answer_batch(&queries), Err(Error::Protocol(_))));
    }

    #[test]
    fn missing_external_counter_is_reported() {
        let mut oracle = UsatOracle::new(QPredicate::ConstNo)
            .with_cross_check(ExternalCounter::new("/nonexistent/counter", vec![]));
        let x = BitString::new(vec![true]);
        let queries = generate_queries(&xor2(), &x, &Limits::default()).unwrap();
        match oracle.answer_batch(&queries) {
            Err(Error::Query { source, .. }) => assert!(matches!(*source, Error::External(_))),
            other => panic!("{other:?}"),
        }
    }
}
