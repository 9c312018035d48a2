//! The `census` command-line tool.
//!
//! Exit codes: 0 ok or all-match, 1 usage, 2 resource limit, 3 inconsistent
//! answers or promise violation, 4 verification mismatch.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};

use census_core::census::battery_size;
use census_core::cnf::{count_models_dpll, from_dimacs, to_dimacs};
use census_core::machines::PromiseCheck;
use census_core::{
    decode_answers, generate_queries, AnswerMap, BatchOracle, CensusResult, Error, QPredicate, Query,
    UsatOracle,
};
use clap::Parser;

use crate::config::{Cli, Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Failed(_) => EXIT_INCONSISTENT,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Resource(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_resource_limit() => CliError::Resource(e.to_string()),
            e @ (Error::Construction(_) | Error::BitString(_) | Error::Parse { .. }) => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

fn io_err(what: &str, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{what}: {e}"))
}

/// Exit code plus the text printed on stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

/// Parses arguments, runs the chosen subcommand, and writes its report.
pub fn main_with_args<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdin) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.report.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "census: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(mut cli: Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    if cli.command == Command::Count {
        return cmd_count(stdin);
    }
    if let Some(path) = cli.flags.config.clone() {
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path.display().to_string(), e))?;
        cli.flags.merge_file(&text)?;
    }
    let config = RunConfig::from_flags(&cli.flags)?;
    match cli.command {
        Command::Run => cmd_run(&config),
        Command::Queries => cmd_queries(&config),
        Command::EmitDimacs => cmd_emit_dimacs(&config),
        Command::Verify => cmd_verify(&config),
        Command::QSweep => cmd_q_sweep(&config),
        Command::Count => unreachable!(),
    }
}

fn oracle_for(config: &RunConfig, q: QPredicate) -> UsatOracle {
    let oracle = UsatOracle::new(q);
    match &config.external_counter {
        Some(counter) => oracle.with_cross_check(counter.clone()),
        None => oracle,
    }
}

struct PipelineRun {
    queries: Vec<Query>,
    answers: AnswerMap,
    result: CensusResult,
    batches: usize,
}

/// Battery, one oracle batch, decode. The same steps as `run_pipeline`,
/// keeping the intermediate battery and answers for traces.
fn pipeline(config: &RunConfig, q: QPredicate) -> Result<PipelineRun, CliError> {
    let lang = &config.language;
    let queries = generate_queries(lang, &config.input, &config.limits)?;
    let mut oracle = oracle_for(config, q);
    let answers = oracle.answer_batch(&queries)?;
    let result = decode_answers(lang, &config.input, &answers)?;
    Ok(PipelineRun {
        batches: oracle.log().batches().len(),
        queries,
        answers,
        result,
    })
}

fn header(config: &RunConfig) -> String {
    let lang = &config.language;
    let x = &config.input;
    let mut s = String::new();
    let _ = writeln!(s, "machine: {}", lang.name());
    let _ = writeln!(s, "input: {x}");
    let _ = writeln!(s, "p(|x|): {}", lang.path_length(x));
    let _ = writeln!(s, "q(|x|): {}", lang.census_bound(x));
    let _ = writeln!(s, "R: {}", lang.decision().name());
    s
}

fn paths_field(paths: &[census_core::BitString]) -> String {
    if paths.is_empty() {
        "-".to_string()
    } else {
        paths.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

fn result_lines(result: &CensusResult) -> String {
    match result {
        CensusResult::Consistent(c) => format!(
            "consistent: yes\nf_hat: {}\npaths: {}\nmember: {}\n",
            c.f_hat,
            paths_field(&c.paths),
            u8::from(c.member)
        ),
        CensusResult::Inconsistent(why) => format!("consistent: no ({why})\n"),
    }
}

fn write_trace(config: &RunConfig, run: &PipelineRun) -> Result<(), CliError> {
    let Some(path) = &config.trace else {
        return Ok(());
    };
    let mut tsv = String::from("c\tj\tk\tb\tcnf_vars\tcnf_clauses\tanswer\n");
    for q in &run.queries {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            q.key.c,
            q.key.j,
            q.key.k,
            u8::from(q.key.b),
            q.formula.var_count(),
            q.formula.clause_count(),
            u8::from(run.answers[&q.key])
        );
    }
    fs::write(path, tsv).map_err(|e| io_err(&path.display().to_string(), e))
}

pub fn cmd_run(config: &RunConfig) -> Result<Outcome, CliError> {
    let run = pipeline(config, config.q.clone())?;
    write_trace(config, &run)?;
    let mut report = header(config);
    let _ = writeln!(report, "Q: {}", config.q);
    let _ = writeln!(report, "queries: {}", run.queries.len());
    let _ = writeln!(report, "batches: {}", run.batches);
    report.push_str(&result_lines(&run.result));
    let code = if run.result.is_consistent() {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    };
    Ok(Outcome { code, report })
}

pub fn cmd_queries(config: &RunConfig) -> Result<Outcome, CliError> {
    let queries = generate_queries(&config.language, &config.input, &config.limits)?;
    let mut report = String::from("c\tj\tk\tb\tcnf_vars\tcnf_clauses\n");
    for q in &queries {
        let _ = writeln!(
            report,
            "{}\t{}\t{}\t{}\t{}\t{}",
            q.key.c,
            q.key.j,
            q.key.k,
            u8::from(q.key.b),
            q.formula.var_count(),
            q.formula.clause_count()
        );
    }
    let p = config.language.path_length(&config.input);
    let q = config.language.census_bound(&config.input);
    let _ = writeln!(
        report,
        "# {} queries (p*q*(q+1) = {p}*{q}*{} = {})",
        queries.len(),
        q + 1,
        battery_size(p, q)
    );
    Ok(Outcome {
        code: EXIT_OK,
        report,
    })
}

pub fn cmd_emit_dimacs(config: &RunConfig) -> Result<Outcome, CliError> {
    let dir = config
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("emit-dimacs needs --out DIR".into()))?;
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| io_err(&dir.display().to_string(), e))?;
        if entries.next().is_some() {
            return Err(CliError::Usage(format!("refusing to write into non-empty {}", dir.display())));
        }
    }
    let queries = generate_queries(&config.language, &config.input, &config.limits)?;
    fs::create_dir_all(dir).map_err(|e| io_err(&dir.display().to_string(), e))?;
    for q in &queries {
        let path = dir.join(format!("{}.cnf", q.canonical_id));
        fs::write(&path, to_dimacs(&q.formula)).map_err(|e| io_err(&path.display().to_string(), e))?;
    }
    Ok(Outcome {
        code: EXIT_OK,
        report: format!("wrote {} files to {}\n", queries.len(), dir.display()),
    })
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let lang = &config.language;
    let x = &config.input;
    let cap = config.limits.enumeration_cap;
    let run = pipeline(config, config.q.clone())?;
    write_trace(config, &run)?;
    let truth = lang.brute_force_paths(x, cap)?;
    let f = truth.len() as u64;
    let promise = lang.verify_promise(x, cap)?;

    let mut report = header(config);
    let _ = writeln!(report, "Q: {}", config.q);
    let _ = writeln!(report, "queries: {}", run.queries.len());
    report.push_str(&result_lines(&run.result));
    match promise {
        PromiseCheck::Ok => report.push_str("promise: ok\n"),
        PromiseCheck::Violated { f, bound } => {
            let _ = writeln!(report, "promise: violated (f={f} > q={bound})");
        }
    }

    let mut all_match = true;
    let mut check = |name: &str, ok: bool, ours: String, theirs: String| {
        all_match &= ok;
        let _ = if ok {
            writeln!(report, "{name}: match ({ours})")
        } else {
            writeln!(report, "{name}: mismatch (pipeline {ours}, brute force {theirs})")
        };
    };
    match run.result.census() {
        Some(c) => {
            check("f_hat", c.f_hat == f, c.f_hat.to_string(), f.to_string());
            check("paths", c.paths == truth, paths_field(&c.paths), paths_field(&truth));
            let member = lang.decide(x, f);
            check(
                "member",
                c.member == member,
                u8::from(c.member).to_string(),
                u8::from(member).to_string(),
            );
        }
        None => check("census", false, "inconsistent".into(), format!("f={f}")),
    }
    report.push_str(if all_match { "verdict: all-match\n" } else { "verdict: mismatch\n" });

    let code = match (promise, all_match) {
        (PromiseCheck::Violated { .. }, _) => EXIT_INCONSISTENT,
        (PromiseCheck::Ok, false) => EXIT_MISMATCH,
        (PromiseCheck::Ok, true) => EXIT_OK,
    };
    Ok(Outcome { code, report })
}

pub fn cmd_q_sweep(config: &RunConfig) -> Result<Outcome, CliError> {
    let seeds = [config.seed, config.seed.wrapping_add(1), config.seed.wrapping_add(2)];
    let mut report = header(config);
    let mut results = Vec::new();
    for q in QPredicate::family(&seeds) {
        let run = pipeline(config, q.clone())?;
        let summary = match &run.result {
            CensusResult::Consistent(c) => {
                format!("f_hat={} paths={} member={}", c.f_hat, paths_field(&c.paths), u8::from(c.member))
            }
            CensusResult::Inconsistent(why) => format!("inconsistent ({why})"),
        };
        let _ = writeln!(report, "{q}: {summary}");
        results.push(run.result);
    }
    let independent = results.windows(2).all(|w| w[0] == w[1]);
    let _ = writeln!(report, "Q-independent: {}", if independent { "yes" } else { "no" });
    let code = if !independent {
        EXIT_MISMATCH
    } else if results[0].is_consistent() {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    };
    Ok(Outcome { code, report })
}

/// Exact model count of the DIMACS formula on stdin. Matches the external
/// counter interface, so the tool can cross-check itself.
pub fn cmd_count(stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let mut bytes = Vec::new();
    stdin
        .read_to_end(&mut bytes)
        .map_err(|e| io_err("stdin", e))?;
    let formula = from_dimacs(&bytes)?;
    Ok(Outcome {
        code: EXIT_OK,
        report: format!("{}\n", count_models_dpll(&formula)?),
    })
}
