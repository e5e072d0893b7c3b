//! The rule engine: transforms an alias diagram instruction by instruction.
//!
//! One [`Analyzer`] runs one entry routine. Choices are computed by
//! replaying per-branch edge deltas and cloning only the part of the
//! diagram a later branch changed; loops and recursive routines iterate to
//! a fixpoint under a bounded creation policy.

mod assign;
mod call;
mod choice;
mod cond;
mod fixpoint;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diagram::{AliasDiagram, DiagramError, Edge, Label, NodeId, PathExpr};
use crate::lang::{Diagnostic, DispatchTarget, Instr, InstrKind, LangError, Program, RoutineDecl, Source, Span};

pub use cond::Truth;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Creations per site inside a fixpoint before the site is summarised.
    pub cap: u32,
    /// Iteration ceiling for one loop or recursive routine.
    pub max_iters: u32,
    /// Call depth beyond which non-repeating recursion is folded.
    pub max_depth: usize,
    /// Verify that every choice branch restores the starting edge set.
    pub check_restore: bool,
    /// Record a diagram after each labeled instruction.
    pub snapshots: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { cap: 1, max_iters: 1000, max_depth: 64, check_restore: false, snapshots: true }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

type Res<T = ()> = Result<T, AnalysisError>;

/// Per-root value sets: root → nodes.
pub(crate) type RootSets = BTreeMap<NodeId, BTreeSet<NodeId>>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub loop_iterations: u64,
    pub recursion_passes: u64,
    pub calls: u64,
    pub max_depth: usize,
    pub choices: u64,
    pub clones: u64,
    /// Choice branches after which the edge set differed from the start.
    pub restore_violations: u64,
    /// Iteration ceilings hit.
    pub ceilings: u64,
}

/// Outcome of analysing one entry routine.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub diagram: AliasDiagram,
    /// Diagram after each execution of a labeled instruction.
    pub snapshots: BTreeMap<String, Vec<AliasDiagram>>,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CallKey {
    class: String,
    routine: String,
    roots: BTreeSet<NodeId>,
    actuals: BTreeMap<NodeId, Vec<BTreeSet<NodeId>>>,
}

/// One routine activation.
#[derive(Debug)]
struct Frame<'p> {
    /// Dynamic class of Current.
    class: &'p str,
    declared_in: &'p str,
    routine: &'p RoutineDecl,
    key: Option<CallKey>,
    scope: Vec<Label>,
    /// Root-level attribute updates may be strong.
    strong_roots: bool,
    /// Caller bindings shadowed by this activation's scope labels.
    saved: BTreeSet<Edge>,
    /// Roots to restore after a qualified call.
    caller_roots: Option<BTreeSet<NodeId>>,
    /// `Result` triples produced so far (read by recursive calls).
    summary: BTreeSet<Edge>,
    dirty: bool,
}

/// Creation counters and clone memo of the outermost active fixpoint.
#[derive(Debug, Default)]
struct Policy {
    counters: BTreeMap<u32, u32>,
    site_summary: BTreeMap<u32, NodeId>,
    clone_memo: BTreeMap<(u32, usize, NodeId), NodeId>,
}

pub struct Analyzer<'p> {
    program: &'p Program,
    config: Config,
    g: AliasDiagram,
    frames: Vec<Frame<'p>>,
    /// Deletion sets of the active fixpoints, innermost last.
    deletions: Vec<BTreeSet<Edge>>,
    policy: Option<Policy>,
    fix_depth: usize,
    clone_origin: BTreeMap<NodeId, NodeId>,
    snapshots: BTreeMap<String, Vec<AliasDiagram>>,
    diagnostics: Vec<Diagnostic>,
    stats: Stats,
    /// Size of (edges ∪ D) after each loop iteration, when tracing.
    pub loop_trace: Option<Vec<Vec<usize>>>,
}

/// Analyses `entry` (`Class.routine` or a unique routine name) starting
/// from `initial`, or from a single empty root.
pub fn analyze(program: &Program, entry: &str, initial: Option<AliasDiagram>, config: Config) -> Res<Analysis> {
    let target = program.entry(entry)?;
    let mut a = Analyzer::new(program, config, initial.unwrap_or_default());
    a.run_entry(target)?;
    Ok(a.finish())
}

impl<'p> Analyzer<'p> {
    pub fn new(program: &'p Program, config: Config, initial: AliasDiagram) -> Self {
        Analyzer {
            program,
            config,
            g: initial.detached(),
            frames: Vec::new(),
            deletions: Vec::new(),
            policy: None,
            fix_depth: 0,
            clone_origin: BTreeMap::new(),
            snapshots: BTreeMap::new(),
            diagnostics: Vec::new(),
            stats: Stats::default(),
            loop_trace: None,
        }
    }

    pub fn diagram(&self) -> &AliasDiagram {
        &self.g
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Runs the body of `target` on Current = the diagram's roots. Entry
    /// locals stay bound afterwards so they can be queried.
    pub fn run_entry(&mut self, target: DispatchTarget<'p>) -> Res {
        self.frames.push(Frame {
            class: target.class,
            declared_in: target.declared_in,
            routine: target.routine,
            key: None,
            scope: target.routine.scope_labels(),
            strong_roots: true,
            saved: BTreeSet::new(),
            caller_roots: None,
            summary: BTreeSet::new(),
            dirty: false,
        });
        let res = self.apply(&target.routine.body);
        self.frames.pop();
        res
    }

    pub fn finish(mut self) -> Analysis {
        self.diagnostics.sort();
        self.diagnostics.dedup();
        Analysis { diagram: self.g, snapshots: self.snapshots, diagnostics: self.diagnostics, stats: self.stats }
    }

    fn frame(&self) -> &Frame<'p> {
        self.frames.last().expect("an active frame")
    }

    fn warn(&mut self, span: Span, msg: String) {
        self.diagnostics.push(Diagnostic::warning(span, msg));
    }

    fn roots(&self) -> Vec<NodeId> {
        self.g.roots().iter().copied().collect()
    }

    fn v(&self, root: NodeId, p: &PathExpr) -> BTreeSet<NodeId> {
        self.g.value_set_from([root], p)
    }

    /// `V_r(p)` for every current root.
    fn per_root(&self, p: &PathExpr) -> RootSets {
        self.roots().into_iter().map(|r| (r, self.v(r, p))).collect()
    }

    pub fn apply(&mut self, instr: &'p Instr) -> Res {
        self.apply_kind(instr)?;
        if let Some(l) = instr.point.label.as_ref().filter(|_| self.config.snapshots) {
            self.snapshots.entry(l.clone()).or_default().push(self.g.detached());
        }
        Ok(())
    }

    fn apply_kind(&mut self, instr: &'p Instr) -> Res {
        let span = instr.span;
        match &instr.kind {
            InstrKind::Assign { target, source } => match source {
                Source::Path(p) => {
                    self.check_void_prefix(span, p);
                    let src = self.per_root(p);
                    self.assign_sets(instr, target, &src)
                }
                Source::Void => {
                    self.assign_sets(instr, target, &RootSets::new())
                }
                Source::Call(c) => self.call_instr(instr, c, Some(target)),
            },
            InstrKind::Create { target } => {
                self.create(instr.point.id, target);
                Ok(())
            }
            InstrKind::Compound(v) => v.iter().try_for_each(|i| self.apply(i)),
            InstrKind::Choice(branches) => self.choice_instr(instr.point.id, branches),
            InstrKind::Guard { cond, body } => self.guard(instr.point.id, cond, body),
            InstrKind::Loop { body } => self.run_loop(span, body),
            InstrKind::Call(c) => self.call_instr(instr, c, None),
        }
    }

    fn check_void_prefix(&mut self, span: Span, p: &PathExpr) {
        for pre in p.prefixes().take(p.len().saturating_sub(1)) {
            if self.g.value_set(&pre).is_empty() {
                self.warn(span, format!("`{p}` reads through `{pre}`, which is void"));
                return;
            }
        }
    }

    /// Every edge held outside the diagram that is logically part of it.
    fn context_edges(&self) -> impl Iterator<Item = &Edge> {
        self.frames
            .iter()
            .flat_map(|f| f.saved.iter().chain(f.summary.iter()))
            .chain(self.deletions.iter().flatten())
    }

    /// Mirrors context state onto fresh clones: for every held triple whose
    /// source was cloned, add the cloned triple.
    fn propagate(&mut self, map: &BTreeMap<NodeId, NodeId>) {
        let lift = |set: &mut BTreeSet<Edge>| {
            let extra: Vec<Edge> = set
                .iter()
                .filter_map(|e| {
                    let s = map.get(&e.source)?;
                    Some(Edge::new(e.label.clone(), *s, *map.get(&e.target).unwrap_or(&e.target)))
                })
                .collect();
            set.extend(extra);
        };
        for f in &mut self.frames {
            lift(&mut f.saved);
            lift(&mut f.summary);
            if let Some(roots) = &mut f.caller_roots {
                let extra: Vec<NodeId> = roots.iter().filter_map(|r| map.get(r).copied()).collect();
                roots.extend(extra);
            }
        }
        for d in &mut self.deletions {
            lift(d);
        }
    }
}

#[cfg(test)]
mod tests;
