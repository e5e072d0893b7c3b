//! Regression corpus: every `NAME.oo` next to a `NAME.expected.json`
//! is analysed and its alias pairs compared with the expectation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use crate::run::{analyse_file, RunConfig};

type Pairs = BTreeSet<(String, String)>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub entry: String,
    #[serde(rename = "final")]
    pub final_pairs: Pairs,
    #[serde(default)]
    pub points: BTreeMap<String, Pairs>,
    #[serde(default)]
    pub cap: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(Vec<String>),
    Skip(String),
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub status: Status,
}

fn expectation_path(oo: &Path) -> PathBuf {
    oo.with_extension("expected.json")
}

fn diff(what: &str, want: &Pairs, got: &Pairs, out: &mut Vec<String>) {
    for (a, b) in want.difference(got) {
        out.push(format!("{what}: missing {a} ~ {b}"));
    }
    for (a, b) in got.difference(want) {
        out.push(format!("{what}: unexpected {a} ~ {b}"));
    }
}

fn check(oo: &Path) -> Result<Status> {
    let exp_path = expectation_path(oo);
    if !exp_path.exists() {
        return Ok(Status::Skip(format!("no {}", exp_path.display())));
    }
    let text = std::fs::read_to_string(&exp_path).with_context(|| format!("cannot read {}", exp_path.display()))?;
    let exp: Expectation = serde_json::from_str(&text).with_context(|| format!("bad expectation {}", exp_path.display()))?;
    let mut cfg = RunConfig::new(oo.to_path_buf(), &exp.entry);
    cfg.cap = exp.cap.unwrap_or(1);
    cfg.points = !exp.points.is_empty();
    let outcome = match analyse_file(&cfg)? {
        Ok(o) => o,
        Err(msg) => return Ok(Status::Fail(vec![msg])),
    };
    let mut problems = Vec::new();
    let got: Pairs = outcome.report.final_pairs.pairs.into_iter().collect();
    diff("exit", &exp.final_pairs, &got, &mut problems);
    for (label, want) in &exp.points {
        match outcome.report.points.iter().find(|p| &p.label == label) {
            Some(p) => diff(label, want, &p.pairs.iter().cloned().collect(), &mut problems),
            None => problems.push(format!("{label}: point not recorded")),
        }
    }
    Ok(if problems.is_empty() { Status::Pass } else { Status::Fail(problems) })
}

/// Cases sorted by file name.
pub fn run_corpus(dir: &Path) -> Result<Vec<CaseResult>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "oo"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| {
            let name = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(CaseResult { name, status: check(f)? })
        })
        .collect()
}

pub fn summary(results: &[CaseResult]) -> String {
    let mut s = String::new();
    for r in results {
        match &r.status {
            Status::Pass => s.push_str(&format!("PASS {}\n", r.name)),
            Status::Skip(why) => s.push_str(&format!("SKIP {} ({why})\n", r.name)),
            Status::Fail(problems) => {
                s.push_str(&format!("FAIL {}\n", r.name));
                for p in problems {
                    s.push_str(&format!("  {p}\n"));
                }
            }
        }
    }
    let count = |f: fn(&Status) -> bool| results.iter().filter(|r| f(&r.status)).count();
    s.push_str(&format!(
        "{} passed, {} failed, {} skipped\n",
        count(|s| *s == Status::Pass),
        count(|s| matches!(s, Status::Fail(_))),
        count(|s| matches!(s, Status::Skip(_))),
    ));
    s
}
