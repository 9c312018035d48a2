//! Parallel census pipeline.
//!
//! A [`machines::FewLanguage`] packages a verifier-circuit family together
//! with a path-length bound `p`, a census bound `q` and a decision predicate
//! `R`. The [`census`] module turns an input `x` into the full battery of
//! `(c, j, k, b)` probes, each compiled to CNF by a parsimonious encoder
//! ([`cnf::tseitin_parsimonious`]), asks a USAT_Q oracle ([`oracle`]) about
//! all of them in one batch, and decodes the answers into the number of
//! accepting paths, the sorted list of those paths, and membership.

pub mod bits;
pub mod census;
pub mod circuit;
pub mod cnf;
pub mod corpus;
pub mod error;
pub mod machines;
pub mod oracle;

pub use bits::BitString;
pub use census::{
    build_j_circuit, decode_answers, generate_queries, run_pipeline, AnswerMap, BatchOracle,
    Census, CensusResult, Inconsistency, Limits, Query, QueryKey,
};
pub use circuit::{Circuit, CircuitBuilder, Gate, GateId};
pub use cnf::{tseitin_parsimonious, CnfFormula, Lit};
pub use error::{Error, Result};
pub use machines::{Decision, FewLanguage, PolyBound, PromiseCheck};
pub use oracle::{CounterBackend, ExternalCounter, OracleLog, QPredicate, UsatOracle};

/// Default cap on the number of variables any exhaustive enumeration may range over.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;
