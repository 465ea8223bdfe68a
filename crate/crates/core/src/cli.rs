//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{estimate_entropy, EntropyResult, TraceStep, DEFAULT_N};
use crate::error::{Error, Result};
use crate::kneading::{check_embedding, critical_itineraries, entropy_estimate_wordcount, EmbeddingCheck};
use crate::map_model::{
    validate_lorenz, AdmissiblePair, LorenzMapSpec, Orientation, ValidationReport, DEFAULT_GRID, DEFAULT_VALIDATION_TOL,
};
use crate::oracles::{build_markov, parry_reference, MarkovPartitionModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ORACLE_UNAVAILABLE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lorenz-entropy", version, about = "Topological entropy intervals for Lorenz maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bisection for one (epsilon, n).
    Entropy {
        #[command(flatten)]
        map: MapSource,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Estimates over a grid of truncation lengths and tolerances.
    Table {
        #[command(flatten)]
        map: MapSource,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10, 100, 1000, 10000])]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 1e-4, 1e-6])]
        eps_list: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check embedding into uniform maps of the given slopes.
    EmbedCheck {
        #[command(flatten)]
        map: MapSource,
        #[arg(long, value_delimiter = ',', required = true)]
        a_list: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Entropy from an independent reference.
    Oracle {
        #[command(flatten)]
        map: MapSource,
        #[arg(long, value_enum, default_value_t = OracleChoice::Auto)]
        oracle: OracleChoice,
        /// Word length for the word-count oracle.
        #[arg(long, default_value_t = 20)]
        words: usize,
        /// Orbit length searched for Markov recurrence.
        #[arg(long, default_value_t = 1000)]
        n_detect: usize,
        /// Also run the bisection at this tolerance and report the discrepancy.
        #[arg(long)]
        compare_epsilon: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Sampled check of the Lorenz-map conditions.
    Validate {
        #[command(flatten)]
        map: MapSource,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct MapSource {
    /// JSON map file.
    #[arg(long, conflicts_with = "uniform", required_unless_present = "uniform")]
    pub map: Option<PathBuf>,
    /// Inline uniform map as `a,p`.
    #[arg(long, value_name = "A,P")]
    pub uniform: Option<String>,
    /// Orientation for an inline uniform map.
    #[arg(long, value_enum, default_value_t = OrientationArg::Upper)]
    pub orientation: OrientationArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrientationArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleChoice {
    Markov,
    Wordcount,
    Parry,
    Auto,
}

impl MapSource {
    pub fn load(&self) -> Result<LorenzMapSpec> {
        if let Some(path) = &self.map {
            return LorenzMapSpec::load(path);
        }
        let text = self.uniform.as_deref().unwrap_or_default();
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [a, p] = parts[..] else {
            return Err(Error::MapFile(format!("--uniform expects `a,p`, got {text:?}")));
        };
        let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::MapFile(format!("not a number: {s:?}")));
        let orientation = match self.orientation {
            OrientationArg::Upper => Orientation::Upper,
            OrientationArg::Lower => Orientation::Lower,
        };
        Ok(LorenzMapSpec::uniform(AdmissiblePair::new(parse(a)?, parse(p)?)?).with_orientation(orientation))
    }
}

/// What a command printed and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn fail(code: i32, stdout: String, stderr: String) -> Self {
        Outcome { stdout, stderr, code }
    }
}

/// Parses arguments and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::fail(EXIT_CONFIG, String::new(), text)
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Entropy { map, epsilon, n, format } => run_entropy(map, *epsilon, *n, *format),
        Command::Table { map, n_list, eps_list, format } => run_table(map, n_list, eps_list, *format),
        Command::EmbedCheck { map, a_list, n, format } => run_embed_check(map, a_list, *n, *format),
        Command::Oracle { map, oracle, words, n_detect, compare_epsilon, n, format } => {
            run_oracle(map, *oracle, *words, *n_detect, *compare_epsilon, *n, *format)
        }
        Command::Validate { map, grid, tol, format } => run_validate(map, *grid, *tol, *format),
    };
    result.unwrap_or_else(|e| error_outcome(&e))
}

fn error_outcome(e: &Error) -> Outcome {
    match e {
        Error::InvalidMap(report) => {
            Outcome::fail(EXIT_VALIDATION, render_validation(report, Format::Table), format!("error: {e}\n"))
        }
        Error::DegenerateCritical => Outcome::fail(EXIT_VALIDATION, String::new(), format!("error: {e}\n")),
        Error::OracleUnavailable(_) | Error::NotMarkov(_) | Error::EnumerationGuard(_) => {
            Outcome::fail(EXIT_ORACLE_UNAVAILABLE, String::new(), format!("oracle unavailable: {e}\n"))
        }
        _ => Outcome::fail(EXIT_CONFIG, String::new(), format!("error: {e}\n")),
    }
}

fn check_run_params(epsilon: f64, n: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct EntropyReport<'a> {
    pub map: &'a LorenzMapSpec,
    pub epsilon: f64,
    pub n: usize,
    pub log_lo: f64,
    pub log_hi: f64,
    pub midpoint_log: f64,
    pub iterations: usize,
    pub undetermined_total: u32,
    pub estimate_a: f64,
    pub midpoint_a: f64,
    pub bracket: [f64; 2],
    pub trace: &'a [TraceStep],
}

impl<'a> EntropyReport<'a> {
    pub fn new(map: &'a LorenzMapSpec, r: &'a EntropyResult) -> Self {
        EntropyReport {
            map,
            epsilon: r.epsilon,
            n: r.truncation_n,
            log_lo: r.log_lo,
            log_hi: r.log_hi,
            midpoint_log: r.log_estimate,
            iterations: r.iterations,
            undetermined_total: r.undetermined_total,
            estimate_a: r.estimate_a,
            midpoint_a: r.midpoint_a,
            bracket: [r.a1, r.a2],
            trace: &r.trace,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn run_entropy(source: &MapSource, epsilon: f64, n: usize, format: Format) -> Result<Outcome> {
    check_run_params(epsilon, n)?;
    let spec = source.load()?;
    let result = estimate_entropy(&spec, epsilon, n)?;
    let report = EntropyReport::new(&spec, &result);
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("epsilon,n,midpoint_log,log_lo,log_hi,iterations,undetermined_total\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                epsilon,
                n,
                result.log_estimate,
                result.log_lo,
                result.log_hi,
                result.iterations,
                result.undetermined_total
            );
            s
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "epsilon        {epsilon:e}");
            let _ = writeln!(s, "n              {n}");
            let _ = writeln!(s, "estimate       {:.10}", result.log_estimate);
            let _ = writeln!(s, "interval       [{:.10}, {:.10}]", result.log_lo, result.log_hi);
            let _ = writeln!(s, "slope bracket  [{}, {}]", result.a1, result.a2);
            let _ = writeln!(s, "iterations     {}", result.iterations);
            let _ = writeln!(s, "undetermined   {}", result.undetermined_total);
            s
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub n: usize,
    pub epsilon: f64,
    pub midpoint_log: f64,
    pub log_lo: f64,
    pub log_hi: f64,
    pub undetermined_total: u32,
}

/// Every (n, epsilon) cell, computed concurrently, in row-major order.
pub fn table_cells(spec: &LorenzMapSpec, n_list: &[usize], eps_list: &[f64]) -> Result<Vec<TableCell>> {
    for &n in n_list {
        for &eps in eps_list {
            check_run_params(eps, n)?;
        }
    }
    let results: Vec<Result<TableCell>> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .flat_map(|&n| eps_list.iter().map(move |&eps| (n, eps)))
            .map(|(n, eps)| {
                scope.spawn(move || {
                    estimate_entropy(spec, eps, n).map(|r| TableCell {
                        n,
                        epsilon: eps,
                        midpoint_log: r.log_estimate,
                        log_lo: r.log_lo,
                        log_hi: r.log_hi,
                        undetermined_total: r.undetermined_total,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
    });
    results.into_iter().collect()
}

pub fn run_table(source: &MapSource, n_list: &[usize], eps_list: &[f64], format: Format) -> Result<Outcome> {
    let spec = source.load()?;
    let cells = table_cells(&spec, n_list, eps_list)?;
    let text = match format {
        Format::Json => to_json(&serde_json::json!({ "map": &spec, "cells": &cells }))?,
        Format::Csv => {
            let mut s = String::from("n,epsilon,midpoint_log,log_lo,log_hi,undetermined_total\n");
            for c in &cells {
                let _ = writeln!(
                    s,
                    "{},{},{:.10},{},{},{}",
                    c.n, c.epsilon, c.midpoint_log, c.log_lo, c.log_hi, c.undetermined_total
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!("{:>8}", "n");
            for eps in eps_list {
                let _ = write!(s, "  {:>14}", format!("eps = {eps:e}"));
            }
            s.push('\n');
            for row in cells.chunks(eps_list.len().max(1)) {
                let _ = write!(s, "{:>8}", row[0].n);
                for c in row {
                    let _ = write!(s, "  {:>14.10}", c.midpoint_log);
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

pub fn run_embed_check(source: &MapSource, a_list: &[f64], n: usize, format: Format) -> Result<Outcome> {
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    let spec = source.load()?;
    let report = validate_lorenz(&spec, DEFAULT_GRID, DEFAULT_VALIDATION_TOL);
    if !report.passed() {
        return Err(Error::InvalidMap(Box::new(report)));
    }
    let crit = critical_itineraries(&spec, n)?;
    let checks: Vec<EmbeddingCheck> = a_list.iter().map(|&a| check_embedding(&crit, a, n)).collect::<Result<_>>()?;
    let fmt_opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.10}"));
    let text = match format {
        Format::Json => to_json(&serde_json::json!({ "map": &spec, "n": n, "checks": &checks }))?,
        Format::Csv => {
            let mut s = String::from("a,status,t1,t2,unique_p,alpha_below_lower_bound\n");
            for c in &checks {
                let (t1, t2) = c.interval.unzip();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    c.a,
                    status_name(c),
                    fmt_opt(t1),
                    fmt_opt(t2),
                    fmt_opt(c.unique_p),
                    c.alpha_below_lower_bound
                );
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for c in &checks {
                let _ = write!(s, "a = {:<10} {:<16}", c.a, status_name(c));
                if let Some((t1, t2)) = c.interval {
                    let _ = write!(s, " t1 = {t1:.10}  t2 = {t2:.10}");
                    if c.alpha_below_lower_bound {
                        s.push_str("  (pi_a(alpha) < 1 - 1/a)");
                    }
                }
                if let Some(p) = c.unique_p {
                    let _ = write!(s, " p = {p:.10}");
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn status_name(c: &EmbeddingCheck) -> String {
    serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub oracle: OracleChoice,
    pub entropy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovPartitionModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<f64>,
}

pub fn oracle_report(
    spec: &LorenzMapSpec,
    choice: OracleChoice,
    words: usize,
    n_detect: usize,
) -> Result<OracleReport> {
    let resolved = match choice {
        OracleChoice::Auto if spec.uniform_pair().is_some() => OracleChoice::Parry,
        OracleChoice::Auto => match build_markov(spec, n_detect) {
            Ok(_) => OracleChoice::Markov,
            Err(_) => OracleChoice::Wordcount,
        },
        other => other,
    };
    let mut report = OracleReport {
        oracle: resolved,
        entropy: f64::NAN,
        markov: None,
        words: None,
        note: None,
        estimate: None,
        discrepancy: None,
    };
    match resolved {
        OracleChoice::Parry => {
            let pair = spec
                .uniform_pair()
                .ok_or_else(|| Error::OracleUnavailable("the Parry value needs a uniform map".into()))?;
            report.entropy = parry_reference(&pair);
        }
        OracleChoice::Markov => {
            let model = build_markov(spec, n_detect)?;
            report.entropy = model.entropy()?;
            report.markov = Some(model);
        }
        OracleChoice::Wordcount => {
            let crit = critical_itineraries(spec, words.max(64))?;
            report.entropy = entropy_estimate_wordcount(&crit, words)?;
            report.words = Some(words);
            report.note = Some("finite-length word growth; expect agreement within about 0.08 at 20+ symbols".into());
        }
        OracleChoice::Auto => unreachable!(),
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn run_oracle(
    source: &MapSource,
    choice: OracleChoice,
    words: usize,
    n_detect: usize,
    compare_epsilon: Option<f64>,
    n: usize,
    format: Format,
) -> Result<Outcome> {
    let spec = source.load()?;
    let mut report = oracle_report(&spec, choice, words, n_detect)?;
    if let Some(eps) = compare_epsilon {
        check_run_params(eps, n)?;
        let r = estimate_entropy(&spec, eps, n)?;
        report.estimate = Some(r.log_estimate);
        report.discrepancy = Some(r.log_estimate - report.entropy);
    }
    let name = serde_json::to_value(report.oracle)?.as_str().unwrap_or_default().to_string();
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            format!(
                "oracle,entropy,estimate,discrepancy\n{name},{},{},{}\n",
                report.entropy,
                opt(report.estimate),
                opt(report.discrepancy)
            )
        }
        Format::Table => {
            let mut s = format!("{name:<10} {:.10}\n", report.entropy);
            if let Some(model) = &report.markov {
                let _ = writeln!(s, "partition  {:?}", model.interval_endpoints);
                for row in &model.adjacency {
                    let _ = writeln!(s, "           {row:?}");
                }
            }
            if let Some(note) = &report.note {
                let _ = writeln!(s, "note       {note}");
            }
            if let (Some(e), Some(d)) = (report.estimate, report.discrepancy) {
                let _ = writeln!(s, "estimate   {e:.10}\ndiff       {d:+.3e}");
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn render_validation(report: &ValidationReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report).unwrap_or_default(),
        Format::Csv => {
            let mut s = String::from("check,status,detail\n");
            for c in &report.checks {
                let _ = writeln!(s, "{},{:?},\"{}\"", c.name, c.status, c.detail.replace('"', "'"));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for c in &report.checks {
                let status = match c.status {
                    crate::map_model::CheckStatus::Pass => "pass",
                    crate::map_model::CheckStatus::Warn => "warn",
                    crate::map_model::CheckStatus::Fail => "FAIL",
                };
                let _ = writeln!(s, "{status:<5} {:<20} {}", c.name, c.detail);
            }
            let _ = writeln!(s, "expansivity estimate {:.6}", report.expansivity_estimate);
            s
        }
    }
}

pub fn run_validate(source: &MapSource, grid: usize, tol: f64, format: Format) -> Result<Outcome> {
    let spec = source.load()?;
    let report = validate_lorenz(&spec, grid, tol);
    let text = render_validation(&report, format);
    Ok(if report.passed() {
        Outcome::ok(text)
    } else {
        Outcome::fail(EXIT_VALIDATION, text, format!("error: {}\n", report.failures().join("; ")))
    })
}
