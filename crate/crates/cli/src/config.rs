//! Command-line flags, the optional `key=value` config file, and the resolved [`RunConfig`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use census_core::machines::library;
use census_core::oracle::ExternalCounter;
use census_core::{BitString, Decision, FewLanguage, Limits, PolyBound, QPredicate};
use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "census", version, about = "Parallel census pipeline over USAT_Q oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the pipeline and report the decoded census.
    Run,
    /// List the query battery without consulting the oracle.
    Queries,
    /// Write one DIMACS file per query into --out.
    EmitDimacs,
    /// Run the pipeline and compare it with brute-force enumeration.
    Verify,
    /// Run the pipeline under every Q in the test family and compare results.
    QSweep,
    /// Read DIMACS on stdin and print its exact model count.
    Count,
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Machine name: const0, exact1, xor2, onehot, subsetsum.
    #[arg(long, global = true)]
    pub machine: Option<String>,

    /// Integer machine parameter (repeatable, in order).
    #[arg(long = "param", global = true)]
    pub params: Vec<u64>,

    /// Input bit string x.
    #[arg(long, global = true)]
    pub input: Option<String>,

    /// Decision predicate R: is-zero, nonzero, parity, even. Defaults to the machine's own.
    #[arg(long = "r", global = true)]
    pub r: Option<String>,

    /// Oracle predicate Q: const-no, const-yes, anti-sat, random.
    #[arg(long = "q", global = true)]
    pub q: Option<String>,

    /// Seed for the random Q (and the base seed of q-sweep).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Enumeration cap (variables) for brute-force checks and the enumerating counter.
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    /// Override the census bound with the constant N.
    #[arg(long = "q-bound", global = true)]
    pub q_bound: Option<u64>,

    /// Output directory for emit-dimacs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write a TSV trace of the battery to FILE.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,

    /// Cross-check every model count against an external counter program.
    #[arg(long = "external-counter", global = true)]
    pub external_counter: Option<PathBuf>,

    /// Read defaults from a key=value file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fills unset flags from `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn merge_file(&mut self, text: &str) -> Result<(), CliError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", idx + 1)))?;
            entries
                .entry(key.trim().to_string())
                .or_default()
                .push(value.trim().to_string());
        }
        let usage = |key: &str, value: &str| CliError::Usage(format!("config: bad value {value:?} for {key}"));
        for (key, values) in entries {
            let last = values.last().expect("at least one value").clone();
            match key.as_str() {
                "machine" => fill(&mut self.machine, last),
                "input" => fill(&mut self.input, last),
                "r" => fill(&mut self.r, last),
                "q" => fill(&mut self.q, last),
                "seed" => fill(&mut self.seed, last.parse().map_err(|_| usage(&key, &last))?),
                "cap" => fill(&mut self.cap, last.parse().map_err(|_| usage(&key, &last))?),
                "q-bound" => fill(&mut self.q_bound, last.parse().map_err(|_| usage(&key, &last))?),
                "out" => fill(&mut self.out, PathBuf::from(last)),
                "trace" => fill(&mut self.trace, PathBuf::from(last)),
                "external-counter" => fill(&mut self.external_counter, PathBuf::from(last)),
                "param" => {
                    if self.params.is_empty() {
                        for v in values.iter().flat_map(|v| v.split(',')) {
                            let v = v.trim();
                            self.params.push(v.parse().map_err(|_| usage(&key, v))?);
                        }
                    }
                }
                other => return Err(CliError::Usage(format!("config: unknown key {other:?}"))),
            }
        }
        Ok(())
    }
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// Fully validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub language: FewLanguage,
    pub input: BitString,
    pub q: QPredicate,
    pub seed: u64,
    pub limits: Limits,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub external_counter: Option<ExternalCounter>,
}

impl RunConfig {
    /// Resolves names and validates values before any work is done.
    pub fn from_flags(flags: &Flags) -> Result<Self, CliError> {
        let machine = flags
            .machine
            .as_deref()
            .ok_or_else(|| CliError::Usage("--machine is required".into()))?;
        let mut language =
            library::by_name(machine, &flags.params).map_err(|e| CliError::Usage(e.to_string()))?;

        let raw = flags
            .input
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input is required".into()))?;
        let input: BitString = raw
            .parse()
            .map_err(|_| CliError::Usage(format!("--input must be a bit string, got {raw:?}")))?;
        if input.is_empty() {
            return Err(CliError::Usage("--input must be nonempty".into()));
        }

        if let Some(name) = &flags.r {
            let decision = Decision::by_name(name).ok_or_else(|| {
                CliError::Usage(format!("unknown R {name:?}; expected one of {:?}", Decision::NAMES))
            })?;
            language = language.with_decision(decision);
        }
        if let Some(bound) = flags.q_bound {
            language = language.with_census_bound(PolyBound::constant(bound));
        }

        let seed = flags.seed.unwrap_or(0);
        let q_name = flags.q.as_deref().unwrap_or("anti-sat");
        let q = QPredicate::by_name(q_name, seed).ok_or_else(|| {
            CliError::Usage(format!("unknown Q {q_name:?}; expected one of {:?}", QPredicate::NAMES))
        })?;

        let mut limits = Limits::default();
        if let Some(cap) = flags.cap {
            if cap == 0 {
                return Err(CliError::Usage("--cap must be positive".into()));
            }
            limits.enumeration_cap = cap;
        }

        Ok(RunConfig {
            language,
            input,
            q,
            seed,
            limits,
            out: flags.out.clone(),
            trace: flags.trace.clone(),
            external_counter: flags
                .external_counter
                .clone()
                .map(|p| ExternalCounter::new(p, Vec::new())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(machine: &str, input: &str) -> Flags {
        Flags {
            machine: Some(machine.into()),
            input: Some(input.into()),
            ..Flags::default()
        }
    }

    #[test]
    fn resolves_defaults() {
        let cfg = RunConfig::from_flags(&flags("xor2", "0110")).unwrap();
        assert_eq!(cfg.language.name(), "xor2");
        assert_eq!(cfg.language.decision().name(), "parity");
        assert_eq!(cfg.q, QPredicate::AntiSat);
        assert_eq!(cfg.limits.enumeration_cap, 24);
    }

    #[test]
    fn rejects_bad_values() {
        for f in [
            flags("nope", "01"),
            flags("xor2", ""),
            flags("xor2", "012"),
            Flags { r: Some("odd?".into()), ..flags("xor2", "01") },
            Flags { q: Some("maybe".into()), ..flags("xor2", "01") },
            Flags { cap: Some(0), ..flags("xor2", "01") },
            Flags { input: None, ..flags("xor2", "01") },
        ] {
            assert!(matches!(RunConfig::from_flags(&f), Err(CliError::Usage(_))), "{f:?}");
        }
    }

    #[test]
    fn config_file_fills_missing_flags() {
        let mut f = Flags {
            q: Some("const-yes".into()),
            ..Flags::default()
        };
        f.merge_file("# demo\nmachine = exact1\nparam = 3, 5\ninput=01\nq=const-no\nseed=7\n")
            .unwrap();
        assert_eq!(f.machine.as_deref(), Some("exact1"));
        assert_eq!(f.params, [3, 5]);
        assert_eq!(f.q.as_deref(), Some("const-yes"));
        assert_eq!(f.seed, Some(7));
        assert!(Flags::default().merge_file("bogus=1").is_err());
        assert!(Flags::default().merge_file("no equals sign").is_err());
        assert!(Flags::default().merge_file("seed=x").is_err());
    }
}
