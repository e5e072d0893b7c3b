//! Alias queries over analysis results, the serialisable report, and the
//! structure-copying property checkers.
//!
//! Queries are answered per root component: two paths are aliased when
//! their value sets meet from a common root, in any frozen diagram recorded
//! for the requested point.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::Analysis;
use crate::diagram::{AliasDiagram, ExprUniverse, PathExpr};
use crate::lang::Diagnostic;

mod deutsch;
mod emit;

pub use deutsch::{check_acyclic, check_pairwise_heads, deutsch_properties, p2, p3, p5, DeutschNames, Verdict};
pub use emit::{emit_dot, emit_json, parse_json};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown program point `{0}`")]
    UnknownPoint(String),
    #[error("depth bound {depth} is shorter than `{path}`")]
    DepthTooShort { path: String, depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasQuery {
    pub path: PathExpr,
    /// Program point label; the routine exit when absent.
    pub at: Option<String>,
    /// Also consider every diagram path up to this length.
    pub depth: Option<usize>,
}

impl AliasQuery {
    pub fn new(path: PathExpr) -> Self {
        AliasQuery { path, at: None, depth: None }
    }

    pub fn at(mut self, label: &str) -> Self {
        self.at = Some(label.to_string());
        self
    }

    pub fn depth(mut self, k: usize) -> Self {
        self.depth = Some(k);
        self
    }
}

/// Diagrams recorded at `at`, or the final diagram.
pub fn diagrams_at<'a>(analysis: &'a Analysis, at: Option<&str>) -> Result<Vec<&'a AliasDiagram>, QueryError> {
    match at {
        None => Ok(vec![&analysis.diagram]),
        Some(l) => analysis
            .snapshots
            .get(l)
            .map(|v| v.iter().collect())
            .ok_or_else(|| QueryError::UnknownPoint(l.to_string())),
    }
}

/// Paths of the universe (plus bounded diagram paths) that may be aliased
/// to the query path. Never contains the query path itself.
pub fn query_alias(analysis: &Analysis, universe: &ExprUniverse, q: &AliasQuery) -> Result<BTreeSet<PathExpr>, QueryError> {
    if let Some(k) = q.depth {
        if k < q.path.len() {
            return Err(QueryError::DepthTooShort { path: q.path.to_string(), depth: k });
        }
    }
    let mut out = BTreeSet::new();
    for g in diagrams_at(analysis, q.at.as_deref())? {
        let mut candidates: BTreeSet<PathExpr> = universe.iter().cloned().collect();
        if let Some(k) = q.depth {
            candidates.extend(g.diagram_paths(k));
        }
        candidates.remove(&q.path);
        out.extend(g.alias_set_among(&q.path, candidates.iter()));
    }
    Ok(out)
}

pub type Pair = (String, String);

/// Unordered aliased pairs of distinct universe paths, each written in
/// sorted order, the list sorted.
pub fn alias_pairs<'a>(diagrams: impl IntoIterator<Item = &'a AliasDiagram>, universe: &ExprUniverse) -> Vec<Pair> {
    let paths: Vec<&PathExpr> = universe.iter().filter(|p| !p.is_current()).collect();
    let mut out = BTreeSet::new();
    for g in diagrams {
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                if g.may_alias(p, q) {
                    let (a, b) = (p.to_string(), q.to_string());
                    out.insert(if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointPairs {
    pub label: String,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalPairs {
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAnswer {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub program: String,
    pub entry: String,
    pub points: Vec<PointPairs>,
    #[serde(rename = "final")]
    pub final_pairs: FinalPairs,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deutsch: Option<BTreeMap<String, Verdict>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<Vec<QueryAnswer>>,
    /// Wall-clock time; kept out of the serialised form so output is stable.
    #[serde(skip)]
    pub timing: Option<Duration>,
}

impl AnalysisReport {
    /// Pairs at every recorded point (sorted by label) and at exit.
    pub fn new(program: &str, entry: &str, analysis: &Analysis, universe: &ExprUniverse) -> Self {
        let points = analysis
            .snapshots
            .iter()
            .map(|(label, gs)| PointPairs { label: label.clone(), pairs: alias_pairs(gs, universe) })
            .collect();
        AnalysisReport {
            program: program.to_string(),
            entry: entry.to_string(),
            points,
            final_pairs: FinalPairs { pairs: alias_pairs([&analysis.diagram], universe) },
            diagnostics: analysis.diagnostics.clone(),
            deutsch: None,
            queries: None,
            timing: None,
        }
    }
}
