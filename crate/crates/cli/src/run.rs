//! Single-file analysis: parse, analyse, query, write reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use aliasgraph::calculus::{analyze, Config};
use aliasgraph::lang::{Diagnostic, Program, Severity};
use aliasgraph::query::{
    deutsch_properties, emit_dot, emit_json, query_alias, AliasQuery, AnalysisReport, DeutschNames, QueryAnswer,
};
use aliasgraph::PathExpr;
use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub entry: String,
    pub cap: u32,
    pub max_iters: u32,
    pub max_path_len: usize,
    pub format: Format,
    pub points: bool,
    pub at: Vec<String>,
    pub queries: Vec<String>,
    pub deutsch: bool,
    pub json: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: PathBuf, entry: &str) -> Self {
        RunConfig {
            input,
            entry: entry.to_string(),
            cap: 1,
            max_iters: 1000,
            max_path_len: 6,
            format: Format::Text,
            points: false,
            at: Vec::new(),
            queries: Vec::new(),
            deutsch: false,
            json: None,
            dot: None,
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTICS: u8 = 1;
pub const EXIT_PARSE: u8 = 2;

fn color() -> bool {
    std::env::var("ALIASGRAPH_COLOR").is_ok_and(|v| v == "1")
}

pub fn render_diagnostic(file: &str, d: &Diagnostic) -> String {
    let (sev, code) = match d.severity {
        Severity::Error => ("error", "31"),
        Severity::Warning => ("warning", "33"),
    };
    let sev = if color() { format!("\x1b[{code}m{sev}\x1b[0m") } else { sev.to_string() };
    format!("{file}:{}:{}: {sev}: {}", d.line, d.col, d.message)
}

/// Everything produced for one input, before anything is written.
pub struct Outcome {
    pub report: AnalysisReport,
    pub dot: String,
    pub exit: u8,
}

pub fn analyse_file(cfg: &RunConfig) -> Result<std::result::Result<Outcome, String>> {
    if cfg.cap < 1 || cfg.max_iters < 1 {
        bail!("--cap and --max-iters must be at least 1");
    }
    let name = cfg.input.display().to_string();
    let src = std::fs::read_to_string(&cfg.input).with_context(|| format!("cannot read {name}"))?;
    let program = match Program::parse(&src) {
        Ok(p) => p,
        Err(e) => return Ok(Err(e.render(&name))),
    };
    let config = Config {
        cap: cfg.cap,
        max_iters: cfg.max_iters,
        snapshots: cfg.points || cfg.deutsch || !cfg.at.is_empty(),
        ..Config::default()
    };
    let started = Instant::now();
    let analysis = match analyze(&program, &cfg.entry, None, config) {
        Ok(a) => a,
        Err(e) => return Ok(Err(format!("{name}: {e}"))),
    };
    let universe = program.universe();
    let mut report = AnalysisReport::new(&file_name(&cfg.input), &cfg.entry, &analysis, &universe);
    report.diagnostics.extend(program.warnings.iter().cloned());
    report.diagnostics.sort();
    if !cfg.points {
        report.points.retain(|p| cfg.at.contains(&p.label));
    }
    if cfg.deutsch {
        report.deutsch = Some(deutsch_properties(&analysis, &DeutschNames::default(), 3));
    }
    if !cfg.queries.is_empty() {
        let ats: Vec<Option<String>> =
            if cfg.at.is_empty() { vec![None] } else { cfg.at.iter().cloned().map(Some).collect() };
        let mut answers = Vec::new();
        for q in &cfg.queries {
            for at in &ats {
                let path = PathExpr::parse(q);
                let query = AliasQuery { path, at: at.clone(), depth: Some(cfg.max_path_len.max(q.split('.').count())) };
                let got = query_alias(&analysis, &universe, &query)?;
                answers.push(QueryAnswer { path: q.clone(), at: at.clone(), aliases: got.iter().map(|p| p.to_string()).collect() });
            }
        }
        report.queries = Some(answers);
    }
    report.timing = Some(started.elapsed());
    let exit = if report.diagnostics.iter().any(|d| d.severity == Severity::Error) { EXIT_DIAGNOSTICS } else { EXIT_OK };
    Ok(Ok(Outcome { report, dot: emit_dot(&analysis.diagram), exit }))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn text_report(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let pairs = |s: &mut String, ps: &[(String, String)]| {
        for (a, b) in ps {
            let _ = writeln!(s, "  {a} ~ {b}");
        }
    };
    for p in &r.points {
        let _ = writeln!(s, "{}:", p.label);
        pairs(&mut s, &p.pairs);
    }
    let _ = writeln!(s, "exit:");
    pairs(&mut s, &r.final_pairs.pairs);
    for q in r.queries.iter().flatten() {
        let at = q.at.as_deref().unwrap_or("exit");
        let _ = writeln!(s, "query {} at {at}: {}", q.path, q.aliases.join(", "));
    }
    for (k, v) in r.deutsch.iter().flatten() {
        let _ = writeln!(s, "{k}: {}", serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    }
    s
}

/// Runs one analysis, writes the configured outputs and returns the exit
/// status. Diagnostics go to standard error.
pub fn run(cfg: &RunConfig) -> Result<u8> {
    let name = cfg.input.display().to_string();
    let outcome = match analyse_file(cfg)? {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("{msg}");
            return Ok(EXIT_PARSE);
        }
    };
    for d in &outcome.report.diagnostics {
        eprintln!("{}", render_diagnostic(&name, d));
    }
    let json = emit_json(&outcome.report);
    if let Some(p) = &cfg.json {
        std::fs::write(p, &json).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = &cfg.dot {
        std::fs::write(p, &outcome.dot).with_context(|| format!("cannot write {}", p.display()))?;
    }
    match cfg.format {
        Format::Text => print!("{}", text_report(&outcome.report)),
        Format::Json => print!("{}", String::from_utf8_lossy(&json)),
        Format::Dot => print!("{}", outcome.dot),
    }
    Ok(outcome.exit)
}
