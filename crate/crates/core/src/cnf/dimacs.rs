//! DIMACS CNF text format.
//!
//! Output is canonical: a `c witness <W>` comment, the `p cnf <V> <C>` header,
//! then one `0`-terminated clause per line, `\n` line endings. The parser
//! accepts exactly one header, ignores other comments and blank lines, and
//! requires each clause on a single line.

use std::fmt::Write as _;

use super::{CnfFormula, Lit};
use crate::error::{Error, Result};

pub fn to_dimacs(f: &CnfFormula) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "c witness {}", f.witness_var_count());
    let _ = writeln!(out, "p cnf {} {}", f.var_count(), f.clause_count());
    for clause in f.clauses() {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out.into_bytes()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses DIMACS text. Without a `c witness` comment every variable counts as a witness variable.
pub fn from_dimacs(bytes: &[u8]) -> Result<CnfFormula> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err(0, e.to_string()))?;
    let mut witness: Option<usize> = None;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(parse_err(line_no, format!("unexpected token {line:?}")));
            }
            let mut words = rest.split_whitespace();
            if words.next() == Some("witness") && header.is_none() {
                let w = words
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "bad witness comment"))?;
                witness = Some(w);
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second header line"));
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let parsed = match tokens.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| parse_err(line_no, format!("malformed header {line:?}")))?);
            continue;
        }
        let Some((var_count, _)) = header else {
            return Err(parse_err(line_no, "clause before header"));
        };
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|_| parse_err(line_no, format!("bad literal {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let Some((&last, body)) = values.split_last() else {
            unreachable!("non-empty line has a token");
        };
        if last != 0 {
            return Err(parse_err(line_no, "clause not terminated by 0"));
        }
        let mut clause = Vec::with_capacity(body.len());
        for &v in body {
            if v == 0 {
                return Err(parse_err(line_no, "literal 0 inside clause"));
            }
            if v.unsigned_abs() as usize > var_count {
                return Err(parse_err(line_no, format!("literal {v} exceeds {var_count} variables")));
            }
            clause.push(Lit::new(v)?);
        }
        clauses.push(clause);
    }

    let (var_count, clause_count) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if clauses.len() != clause_count {
        return Err(parse_err(
            text.lines().count(),
            format!("header declares {clause_count} clauses, found {}", clauses.len()),
        ));
    }
    let witness = witness.unwrap_or(var_count);
    CnfFormula::new(var_count, witness, clauses).map_err(|e| parse_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::new(x).unwrap()).collect()
    }

    #[test]
    fn writes_exact_bytes() {
        let f = CnfFormula::new(3, 2, vec![lits(&[1, -2]), lits(&[3])]).unwrap();
        assert_eq!(
            String::from_utf8(to_dimacs(&f)).unwrap(),
            "c witness 2\np cnf 3 2\n1 -2 0\n3 0\n"
        );
    }

    #[test]
    fn constant_false_bytes() {
        let f = CnfFormula::constant_false(2, 2);
        let text = to_dimacs(&f);
        assert_eq!(text, b"c witness 2\np cnf 2 1\n0\n");
        assert_eq!(from_dimacs(&text), Ok(f));
    }

    #[test]
    fn round_trip() {
        let f = CnfFormula::new(4, 1, vec![lits(&[1, -2]), lits(&[3, 4, -1]), vec![]]).unwrap();
        assert_eq!(from_dimacs(&to_dimacs(&f)), Ok(f));
    }

    #[test]
    fn rejects_embedded_terminator() {
        let err = from_dimacs(b"p cnf 2 1\n1 0 2 0\n").unwrap_err();
        assert_eq!(err, parse_err(2, "literal 0 inside clause"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases: [(&[u8], usize); 6] = [
            (b"p cnf 2\n", 1),
            (b"p dnf 2 1\n1 0\n", 1),
            (b"c hi\np cnf 2 1\n3 0\n", 3),
            (b"p cnf 2 1\n1 2\n", 2),
            (b"1 0\np cnf 1 1\n", 1),
            (b"p cnf 1 1\np cnf 1 1\n", 2),
        ];
        for (text, line) in cases {
            match from_dimacs(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{:?}", String::from_utf8_lossy(text)),
                other => panic!("expected parse error, got {other:?}"),
            }
        }
        assert!(from_dimacs(b"p cnf 2 2\n1 0\n").is_err());
        assert!(from_dimacs(b"c only\n").is_err());
    }

    #[test]
    fn missing_witness_comment_defaults_to_all_variables() {
        let f = from_dimacs(b"c generic\np cnf 3 1\n1 2 0\n").unwrap();
        assert_eq!(f.witness_var_count(), 3);
    }
}
