//! The parallel census reduction.
//!
//! For an input `x` with path length `p = p(|x|)` and census bound
//! `q = q(|x|)`, every tuple `(c, j, k, b)` with `1 <= c <= q`, `1 <= j <= c`,
//! `1 <= k <= p` and `b ∈ {0,1}` becomes one query: the CNF of a circuit that
//! accepts a concatenation `p_1 ‖ … ‖ p_c` of `c` strictly increasing
//! accepting paths whose `j`-th member has bit `k` equal to `b`. All queries
//! go to the oracle in a single batch.
//!
//! When `c` equals the true census `f(x)` there is exactly one increasing
//! listing, so each J-circuit has zero or one witness and the USAT_Q answer
//! is the plain truth of "bit `k` of the `j`-th smallest accepting path is
//! `b`". Above the census no listing exists and every answer is no. Below it
//! the answers depend on the oracle's free predicate and are ignored: the
//! decoder reads the largest `c` that received any yes.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::bits::BitString;
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::cnf::{tseitin_parsimonious, CnfFormula};
use crate::error::{Error, Result};
use crate::machines::FewLanguage;
use crate::DEFAULT_ENUMERATION_CAP;

/// One probe `(c, j, k, b)`. The derived order is the canonical battery order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QueryKey {
    pub c: u64,
    pub j: u64,
    pub k: u64,
    pub b: bool,
}

impl fmt::Display for QueryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(c={}, j={}, k={}, b={})", self.c, self.j, self.k, u8::from(self.b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub key: QueryKey,
    pub formula: CnfFormula,
    pub canonical_id: String,
}

/// Oracle verdicts keyed by probe.
pub type AnswerMap = BTreeMap<QueryKey, bool>;

/// Size limits for battery generation and brute-force checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Cap on variables for any exhaustive enumeration.
    pub enumeration_cap: usize,
    /// Cap on `q(|x|) * p(|x|)`, the widest J-circuit in the battery.
    pub max_j_witness_bits: u64,
    /// Cap on the number of queries in one battery.
    pub max_queries: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            max_j_witness_bits: 128,
            max_queries: 1 << 16,
        }
    }
}

/// Length-prefixed, fixed-width encoding of `⟨x, c, j, k, b⟩`; also used as a file stem.
pub fn canonical_id(x: &BitString, key: QueryKey) -> String {
    format!(
        "{:04}-{x}-{:04}-{:04}-{:04}-{}",
        x.len(),
        key.c,
        key.j,
        key.k,
        u8::from(key.b)
    )
}

/// Number of queries for path length `p` and census bound `q`.
pub fn battery_size(p: u64, q: u64) -> u64 {
    p * q * (q + 1)
}

/// All probe tuples in canonical order.
pub fn battery_keys(p: u64, q: u64) -> Vec<QueryKey> {
    let mut keys = Vec::new();
    for c in 1..=q {
        for j in 1..=c {
            for k in 1..=p {
                for b in [false, true] {
                    keys.push(QueryKey { c, j, k, b });
                }
            }
        }
    }
    keys
}

/// The circuit over `c * p(|x|)` witness bits accepting `p_1 ‖ … ‖ p_c` iff
/// `p_1 < … < p_c`, every `p_i` is an accepting path on `x`, and bit `k` of
/// `p_j` is `b`.
pub fn build_j_circuit(lang: &FewLanguage, x: &BitString, c: u64, j: u64, k: u64, b: bool) -> Result<Circuit> {
    let verifier = lang.verifier(x)?;
    let p = verifier.input_count();
    if c == 0 || j == 0 || j > c || k == 0 || k as usize > p {
        return Err(Error::construction(format!(
            "J-instance parameters out of range: c={c}, j={j}, k={k}, p={p}"
        )));
    }
    let c = usize::try_from(c).map_err(|_| Error::construction("c too large"))?;
    let width = c
        .checked_mul(p)
        .ok_or_else(|| Error::construction("J-circuit width overflows"))?;

    let mut builder = CircuitBuilder::new(width);
    let blocks: Vec<Vec<GateId>> = (0..c)
        .map(|i| (1..=p).map(|bit| builder.input(i * p + bit)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let mut terms = Vec::with_capacity(2 * c + 1);
    for pair in blocks.windows(2) {
        terms.push(builder.less_than(&pair[0], &pair[1])?);
    }
    for block in &blocks {
        terms.push(builder.embed(&verifier, block)?);
    }
    let probed = blocks[j as usize - 1][k as usize - 1];
    terms.push(builder.equals_bit(probed, b));
    let out = builder.and_all(&terms);
    Ok(builder.finish(out))
}

/// The full battery for `x`, in canonical order, each query compiled to CNF.
pub fn generate_queries(lang: &FewLanguage, x: &BitString, limits: &Limits) -> Result<Vec<Query>> {
    let p = lang.path_length(x);
    let q = lang.census_bound(x);
    if p == 0 {
        return Err(Error::construction(format!(
            "machine {} has path length 0 on x={x:?}",
            lang.name()
        )));
    }
    let width = p.saturating_mul(q);
    if width > limits.max_j_witness_bits {
        return Err(Error::ResourceLimit {
            what: "J-circuit witness bits",
            size: width,
            cap: limits.max_j_witness_bits,
        });
    }
    let size = p.saturating_mul(q).saturating_mul(q.saturating_add(1));
    if size > limits.max_queries {
        return Err(Error::ResourceLimit {
            what: "battery size",
            size,
            cap: limits.max_queries,
        });
    }
    battery_keys(p, q)
        .into_par_iter()
        .map(|key| {
            let circuit = build_j_circuit(lang, x, key.c, key.j, key.k, key.b)?;
            Ok(Query {
                key,
                formula: tseitin_parsimonious(&circuit),
                canonical_id: canonical_id(x, key),
            })
        })
        .collect()
}

/// A decoded census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub f_hat: u64,
    pub paths: Vec<BitString>,
    pub member: bool,
}

/// Why a battery of answers could not be decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inconsistency {
    /// Both `b = 0` and `b = 1` answered yes at the decoded level.
    AmbiguousBit { j: u64, k: u64 },
    /// Neither value of `b` answered yes at the decoded level.
    MissingBit { j: u64, k: u64 },
    /// Path `j` is not strictly below path `j + 1`.
    NotIncreasing { j: u64 },
    /// Path `j` is rejected by the verifier.
    RejectedPath { j: u64, path: BitString },
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistency::AmbiguousBit { j, k } => write!(f, "ambiguous bit {k} of path {j}"),
            Inconsistency::MissingBit { j, k } => write!(f, "missing bit {k} of path {j}"),
            Inconsistency::NotIncreasing { j } => {
                write!(f, "paths {j} and {} are not strictly increasing", j + 1)
            }
            Inconsistency::RejectedPath { j, path } => {
                write!(f, "path {j} ({path}) is not accepting")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CensusResult {
    Consistent(Census),
    Inconsistent(Inconsistency),
}

impl CensusResult {
    pub fn is_consistent(&self) -> bool {
        matches!(self, CensusResult::Consistent(_))
    }

    pub fn census(&self) -> Option<&Census> {
        match self {
            CensusResult::Consistent(c) => Some(c),
            CensusResult::Inconsistent(_) => None,
        }
    }
}

/// Decodes a complete battery of answers into the census, the accepting
/// paths and the membership verdict.
///
/// Answers are treated as an unordered mapping. The decoded paths are
/// validated (unique bit values, strict order, acceptance by the verifier)
/// before a consistent result is reported.
pub fn decode_answers(lang: &FewLanguage, x: &BitString, answers: &AnswerMap) -> Result<CensusResult> {
    let p = lang.path_length(x);
    let q = lang.census_bound(x);
    let expected = battery_keys(p, q);
    if let Some(missing) = expected.iter().find(|k| !answers.contains_key(k)) {
        return Err(Error::Protocol(format!("no answer for {missing}")));
    }
    if answers.len() != expected.len() {
        let extra = answers
            .keys()
            .find(|k| expected.binary_search(k).is_err())
            .expect("extra key exists");
        return Err(Error::Protocol(format!("unexpected answer for {extra}")));
    }

    let Some(c_hat) = answers.iter().filter(|(_, &yes)| yes).map(|(k, _)| k.c).max() else {
        return Ok(CensusResult::Consistent(Census {
            f_hat: 0,
            paths: Vec::new(),
            member: lang.decide(x, 0),
        }));
    };

    let mut paths = Vec::with_capacity(c_hat as usize);
    for j in 1..=c_hat {
        let mut bits = Vec::with_capacity(p as usize);
        for k in 1..=p {
            let yes = |b| answers[&QueryKey { c: c_hat, j, k, b }];
            match (yes(false), yes(true)) {
                (true, true) => return Ok(CensusResult::Inconsistent(Inconsistency::AmbiguousBit { j, k })),
                (false, false) => return Ok(CensusResult::Inconsistent(Inconsistency::MissingBit { j, k })),
                (zero, _) => bits.push(!zero),
            }
        }
        paths.push(BitString::new(bits));
    }

    if let Some(pos) = paths.windows(2).position(|w| w[0] >= w[1]) {
        return Ok(CensusResult::Inconsistent(Inconsistency::NotIncreasing { j: pos as u64 + 1 }));
    }
    let verifier = lang.verifier(x)?;
    for (idx, path) in paths.iter().enumerate() {
        if !verifier.evaluate(path)? {
            return Ok(CensusResult::Inconsistent(Inconsistency::RejectedPath {
                j: idx as u64 + 1,
                path: path.clone(),
            }));
        }
    }

    Ok(CensusResult::Consistent(Census {
        f_hat: c_hat,
        member: lang.decide(x, c_hat),
        paths,
    }))
}

/// Any oracle that answers a whole battery at once.
pub trait BatchOracle {
    fn answer_batch(&mut self, queries: &[Query]) -> Result<AnswerMap>;
}

/// Generates the battery, submits it as one batch, and decodes the answers.
///
/// No query depends on an answer: the battery is fully built before the
/// oracle is called, and the oracle is called exactly once.
pub fn run_pipeline(
    lang: &FewLanguage,
    x: &BitString,
    oracle: &mut dyn BatchOracle,
    limits: &Limits,
) -> Result<CensusResult> {
    let queries = generate_queries(lang, x, limits)?;
    let answers = oracle.answer_batch(&queries)?;
    decode_answers(lang, x, &answers)
}
