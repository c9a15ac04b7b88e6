//! Command-line front end for the `bracketeer` integration engine.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;

use bracketeer::engine::{classify, EngineError};
use bracketeer::exact::{fmt_rational, parse_rational};
use bracketeer::numeric::{EvaluationReport, Verdict};
use bracketeer::pipeline::{check_bindings, Diagnostics};
use bracketeer::{
    evaluate, parse_integrands, solve, verify, Bindings, Error, EvalOptions, Integrand, PochMode, Solved,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable holding the default tolerance.
pub const TOL_ENV: &str = "BRACKETEER_TOL";

pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const NO_CONVERGENT_SOLUTION: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "bracketeer", version, about = "Definite integrals over (0, inf) by the method of brackets")]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every bracket-series representation of the integrand.
    Expand { expr: String },
    /// List the series solutions of the chosen representation.
    Solve {
        expr: String,
        /// Bindings used to classify the solutions, as NAME=VALUE.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        legacy_poch: bool,
    },
    /// Evaluate the integral.
    Eval {
        expr: String,
        #[command(flatten)]
        opts: EvalArgs,
    },
    /// Evaluate the integral and compare with numerical quadrature.
    Verify {
        expr: String,
        #[command(flatten)]
        opts: EvalArgs,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Parameter or exponent binding, as NAME=VALUE. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Series truncation tolerance (eval) or verdict tolerance (verify).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_terms: usize,
    /// Use the direct limit for Pochhammer symbols at negative integers.
    #[arg(long)]
    legacy_poch: bool,
}

const DEFAULT_EVAL_TOL: f64 = 1e-12;
const DEFAULT_VERIFY_TOL: f64 = 1e-6;

/// A failure with its exit code and JSON detail.
struct Failure {
    code: i32,
    message: String,
    detail: Value,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        let message = message.into();
        Self { code: exit::INPUT, detail: json!({ "kind": "input", "message": message }), message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_input_error() => exit::INPUT,
            Error::Engine(EngineError::NoConvergentSolution) => exit::NO_CONVERGENT_SOLUTION,
            _ => exit::NUMERIC,
        };
        let mut detail = serde_json::to_value(&e).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut detail {
            map.insert("message".into(), Value::String(e.to_string()));
        }
        Self { code, message: e.to_string(), detail }
    }
}

fn parse_input(text: &str) -> Result<Vec<Integrand>, Failure> {
    parse_integrands(text).map_err(|e| {
        let mut message = e.to_string();
        if let Some(span) = e.span() {
            let width = (span.end - span.start).max(1);
            message = format!("{message}\n  {text}\n  {}{}", " ".repeat(span.start), "^".repeat(width));
        }
        let mut f = Failure::from(Error::from(e));
        f.message = message;
        f
    })
}

fn bind(integrands: &[Integrand], params: &[String]) -> Result<Bindings, Failure> {
    let consts: Vec<String> = integrands.iter().flat_map(|i| i.sym_consts()).map(|c| c.name().to_string()).collect();
    let scales: Vec<String> = integrands.iter().flat_map(|i| i.params()).map(|p| p.name().to_string()).collect();
    let mut b = Bindings::new();
    for item in params {
        let (name, value) =
            item.split_once('=').ok_or_else(|| Failure::input(format!("expected NAME=VALUE, got `{item}`")))?;
        let (name, value) = (name.trim(), value.trim());
        if consts.iter().any(|c| c == name) {
            let q = parse_rational(value)
                .ok_or_else(|| Failure::input(format!("`{name}` needs an exact rational value, got `{value}`")))?;
            b.bind_const(name, q);
        } else if scales.iter().any(|p| p == name) {
            let v: f64 = value.parse().map_err(|_| Failure::input(format!("`{name}`: `{value}` is not a number")))?;
            b.bind_param(name, v).map_err(|e| Failure::from(Error::from(e)))?;
        } else {
            return Err(Failure::input(format!("`{name}` does not occur in the integrand")));
        }
    }
    Ok(b)
}

fn default_tol(explicit: Option<f64>, fallback: f64) -> Result<f64, Failure> {
    let tol = match explicit {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s.parse().map_err(|_| Failure::input(format!("{TOL_ENV}=`{s}` is not a number")))?,
            Err(_) => fallback,
        },
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn mode(legacy: bool) -> PochMode {
    if legacy {
        PochMode::Legacy
    } else {
        PochMode::Regularized
    }
}

#[derive(Serialize)]
struct RepresentationJson {
    integrand: usize,
    indices: Vec<String>,
    term: String,
    brackets: Vec<String>,
    index: usize,
    chosen: bool,
}

#[derive(Serialize)]
struct SolutionJson {
    integrand: usize,
    free_indices: Vec<String>,
    substitutions: BTreeMap<String, String>,
    weight: String,
    term: String,
    classification: Option<bracketeer::Classification>,
    value: Option<f64>,
    terms_used: usize,
}

fn representations_json(solved: &[Solved]) -> Vec<RepresentationJson> {
    solved
        .iter()
        .enumerate()
        .flat_map(|(k, s)| {
            s.representations.iter().enumerate().map(move |(r, rep)| RepresentationJson {
                integrand: k,
                indices: rep.indices.iter().map(ToString::to_string).collect(),
                term: rep.term.to_string(),
                brackets: rep.brackets.iter().map(ToString::to_string).collect(),
                index: rep.indices.len().saturating_sub(rep.brackets.len()),
                chosen: r == s.chosen,
            })
        })
        .collect()
}

fn solution_json(k: usize, sol: &bracketeer::SeriesSolution, value: Option<f64>, terms_used: usize) -> SolutionJson {
    SolutionJson {
        integrand: k,
        free_indices: sol.free_indices.iter().map(ToString::to_string).collect(),
        substitutions: sol.substitutions.iter().map(|(v, e)| (v.to_string(), e.to_string())).collect(),
        weight: fmt_rational(&sol.weight),
        term: sol.term.to_string(),
        classification: sol.classification.clone(),
        value,
        terms_used,
    }
}

fn finite(x: Option<f64>) -> Value {
    match x {
        Some(v) if v.is_finite() => json!(v),
        _ => Value::Null,
    }
}

/// Output document; every command fills the keys it knows.
struct Doc {
    command: &'static str,
    input: String,
    representations: Vec<RepresentationJson>,
    solutions: Vec<SolutionJson>,
    value: Option<f64>,
    oracle: Option<f64>,
    abs_error: Option<f64>,
    rel_error: Option<f64>,
    verdict: Option<Verdict>,
    diagnostics: Diagnostics,
    reasons: Vec<String>,
    error: Option<Value>,
}

impl Doc {
    fn new(command: &'static str, input: &str) -> Self {
        Self {
            command,
            input: input.to_string(),
            representations: Vec::new(),
            solutions: Vec::new(),
            value: None,
            oracle: None,
            abs_error: None,
            rel_error: None,
            verdict: None,
            diagnostics: Diagnostics::default(),
            reasons: Vec::new(),
            error: None,
        }
    }

    fn to_json(&self) -> Value {
        let mut diagnostics = serde_json::to_value(&self.diagnostics).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut diagnostics {
            map.insert("reasons".into(), json!(self.reasons));
        }
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "input": self.input,
            "representations": self.representations,
            "solutions": self.solutions,
            "value": finite(self.value),
            "oracle": finite(self.oracle),
            "abs_error": finite(self.abs_error),
            "rel_error": finite(self.rel_error),
            "verdict": self.verdict,
            "diagnostics": diagnostics,
            "error": self.error,
        })
    }
}

fn solve_all(integrands: &[Integrand]) -> Result<Vec<Solved>, Failure> {
    integrands.iter().map(|i| solve(i).map_err(Failure::from)).collect()
}

fn write_representations(out: &mut dyn Write, solved: &[Solved]) -> std::io::Result<()> {
    for (k, s) in solved.iter().enumerate() {
        for (r, rep) in s.representations.iter().enumerate() {
            let index = rep.indices.len().saturating_sub(rep.brackets.len());
            let mark = if r == s.chosen { " [chosen]" } else { "" };
            writeln!(out, "integrand {k} representation {r} (index {index}){mark}")?;
            let idx: Vec<String> = rep.indices.iter().map(ToString::to_string).collect();
            writeln!(out, "  indices:  {}", idx.join(", "))?;
            writeln!(out, "  term:     {}", rep.term)?;
            for b in &rep.brackets {
                writeln!(out, "  bracket:  <{b}>")?;
            }
        }
    }
    Ok(())
}

fn write_solutions(out: &mut dyn Write, sols: &[SolutionJson]) -> std::io::Result<()> {
    for (i, s) in sols.iter().enumerate() {
        writeln!(out, "integrand {} solution {i}", s.integrand)?;
        writeln!(out, "  free:     [{}]", s.free_indices.join(", "))?;
        for (v, e) in &s.substitutions {
            writeln!(out, "  {v} = {e}")?;
        }
        writeln!(out, "  weight:   {}", s.weight)?;
        writeln!(out, "  term:     {}", s.term)?;
        match &s.classification {
            Some(c) => writeln!(out, "  class:    {c}")?,
            None => writeln!(out, "  class:    unclassified (bind all parameters to classify)")?,
        }
        if let Some(v) = s.value {
            writeln!(out, "  value:    {v} ({} terms)", s.terms_used)?;
        }
    }
    Ok(())
}

fn run_expand(doc: &mut Doc, out: &mut dyn Write, json: bool, expr: &str) -> Result<i32, Failure> {
    let solved = solve_all(&parse_input(expr)?)?;
    doc.representations = representations_json(&solved);
    if !json {
        write_representations(out, &solved).map_err(io_failure)?;
    }
    Ok(exit::OK)
}

fn run_solve(
    doc: &mut Doc,
    out: &mut dyn Write,
    json: bool,
    expr: &str,
    params: &[String],
    legacy: bool,
) -> Result<i32, Failure> {
    let integrands = parse_input(expr)?;
    let bindings = bind(&integrands, params)?;
    let solved = solve_all(&integrands)?;
    let bound = check_bindings(&integrands, &bindings).is_ok();
    doc.representations = representations_json(&solved);
    for (k, s) in solved.iter().enumerate() {
        for sol in &s.solutions {
            let mut sol = sol.clone();
            if bound && sol.classification.is_none() {
                sol.classification =
                    Some(classify(&sol, &bindings, mode(legacy)).map_err(|e| Failure::from(Error::from(e)))?);
            }
            doc.solutions.push(solution_json(k, &sol, None, 0));
        }
    }
    if !json {
        write_solutions(out, &doc.solutions).map_err(io_failure)?;
    }
    Ok(exit::OK)
}

fn run_eval(doc: &mut Doc, out: &mut dyn Write, json: bool, expr: &str, args: &EvalArgs) -> Result<i32, Failure> {
    let integrands = parse_input(expr)?;
    let bindings = bind(&integrands, &args.params)?;
    let opts = EvalOptions {
        tol: default_tol(args.tol, DEFAULT_EVAL_TOL)?,
        max_terms: args.max_terms,
        mode: mode(args.legacy_poch),
    };
    check_bindings(&integrands, &bindings).map_err(|e| Failure::from(Error::from(e)))?;
    // Solutions are reported even when evaluation fails.
    let solved = solve_all(&integrands)?;
    doc.representations = representations_json(&solved);
    match evaluate::<f64>(&integrands, &bindings, &opts) {
        Ok(e) => {
            for (k, ie) in e.integrands.iter().enumerate() {
                for sv in &ie.solutions {
                    let (v, n) = sv.sum.as_ref().map_or((None, 0), |s| (Some(s.value), s.terms_used));
                    doc.solutions.push(solution_json(k, &sv.solution, v, n));
                }
            }
            doc.value = Some(e.value);
            doc.diagnostics = e.diagnostics;
            if !json {
                writeln!(out, "{}", e.value).map_err(io_failure)?;
            }
            Ok(exit::OK)
        }
        Err(err) => {
            if let Ok(classified) = bracketeer::pipeline::classify_all(&solved, &bindings, opts.mode) {
                for (k, sols) in classified.iter().enumerate() {
                    for sol in sols {
                        doc.solutions.push(solution_json(k, sol, None, 0));
                    }
                }
            }
            Err(Failure::from(err))
        }
    }
}

fn run_verify(doc: &mut Doc, out: &mut dyn Write, json: bool, expr: &str, args: &EvalArgs) -> Result<i32, Failure> {
    let integrands = parse_input(expr)?;
    let bindings = bind(&integrands, &args.params)?;
    let tol = default_tol(args.tol, DEFAULT_VERIFY_TOL)?;
    let opts = EvalOptions { tol: DEFAULT_EVAL_TOL.min(tol), max_terms: args.max_terms, mode: mode(args.legacy_poch) };
    let report: EvaluationReport<f64> = verify(&integrands, &bindings, tol, &opts).map_err(Failure::from)?;
    doc.representations = representations_json(&solve_all(&integrands)?);
    doc.value = report.engine_value;
    doc.oracle = report.oracle_value;
    doc.abs_error = report.abs_error;
    doc.rel_error = report.rel_error;
    doc.verdict = Some(report.verdict);
    doc.reasons = report.reasons.clone();
    doc.solutions = report
        .classification_log
        .iter()
        .map(|r| SolutionJson {
            integrand: r.integrand,
            free_indices: r.free_indices.clone(),
            substitutions: r.substitutions.clone(),
            weight: r.weight.clone(),
            term: String::new(),
            classification: r.classification.clone(),
            value: r.value,
            terms_used: r.terms_used,
        })
        .collect();
    if !json {
        let show = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v}"));
        let show_e = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
        let verdict = match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        writeln!(out, "engine:    {}", show(report.engine_value)).map_err(io_failure)?;
        writeln!(out, "oracle:    {}", show(report.oracle_value)).map_err(io_failure)?;
        writeln!(out, "abs error: {}", show_e(report.abs_error)).map_err(io_failure)?;
        writeln!(out, "rel error: {}", show_e(report.rel_error)).map_err(io_failure)?;
        writeln!(out, "terms:     {}", report.terms_used).map_err(io_failure)?;
        writeln!(out, "verdict:   {verdict} (tolerance {tol:e})").map_err(io_failure)?;
        for r in &report.reasons {
            writeln!(out, "reason:    {r}").map_err(io_failure)?;
        }
    }
    Ok(match report.verdict {
        Verdict::Pass => exit::OK,
        Verdict::Fail => exit::VERIFY_FAILED,
    })
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure { code: exit::NUMERIC, message: e.to_string(), detail: json!({ "kind": "io", "message": e.to_string() }) }
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_with_output<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let (name, expr) = match &cli.command {
        Command::Expand { expr } => ("expand", expr),
        Command::Solve { expr, .. } => ("solve", expr),
        Command::Eval { expr, .. } => ("eval", expr),
        Command::Verify { expr, .. } => ("verify", expr),
    };
    let mut doc = Doc::new(name, expr);
    let result = match &cli.command {
        Command::Expand { expr } => run_expand(&mut doc, out, cli.json, expr),
        Command::Solve { expr, params, legacy_poch } => run_solve(&mut doc, out, cli.json, expr, params, *legacy_poch),
        Command::Eval { expr, opts } => run_eval(&mut doc, out, cli.json, expr, opts),
        Command::Verify { expr, opts } => run_verify(&mut doc, out, cli.json, expr, opts),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            doc.error = Some(f.detail);
            f.code
        }
    };
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc.to_json()).unwrap_or_default());
    }
    code
}

/// Runs the CLI on `args` (program name first) using standard streams.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_output(args, &mut stdout.lock(), &mut stderr.lock())
}
