use std::collections::{BTreeSet, HashSet};

use crate::diagram::Edge;
use crate::lang::{Diagnostic, Instr, Span};

use super::{Analyzer, Policy, Res};

impl<'p> Analyzer<'p> {
    pub(super) fn enter_fix(&mut self) {
        if self.fix_depth == 0 {
            self.policy = Some(Policy::default());
        }
        self.fix_depth += 1;
    }

    pub(super) fn exit_fix(&mut self) {
        self.fix_depth -= 1;
        if self.fix_depth == 0 {
            self.policy = None;
        }
    }

    /// Puts every deleted edge of the innermost fixpoint back.
    pub(super) fn reinsert_deletions(&mut self) {
        let d: Vec<Edge> = self.deletions.last().into_iter().flatten().cloned().collect();
        for e in d {
            if self.g.contains_node(e.source) && self.g.contains_node(e.target) {
                self.g.add_edge(e);
            }
        }
    }

    pub(super) fn ceiling(&mut self, span: Span, what: &str) {
        self.stats.ceilings += 1;
        self.diagnostics.push(Diagnostic::error(
            span,
            format!("{what} did not reach a fixpoint within {} iterations", self.config.max_iters),
        ));
    }

    /// `loop body end`: the union of the diagrams after 0, 1, 2, …
    /// iterations. Iterates in place, diverting each iteration's net
    /// deletions to D, until the state repeats; then re-inserts D.
    pub(super) fn run_loop(&mut self, span: Span, body: &'p Instr) -> Res {
        self.enter_fix();
        self.deletions.push(BTreeSet::new());
        let mut seen = HashSet::from([self.g.fingerprint()]);
        let mut roots = self.g.roots().clone();
        let mut trace = Vec::new();
        let mut iters = 0u32;
        let res = loop {
            self.g.push_journal();
            let res = self.apply(body);
            let delta = self.g.commit_journal();
            if let Err(e) = res {
                break Err(e);
            }
            self.deletions.last_mut().expect("loop scope").extend(delta.removed);
            roots.extend(self.g.roots().iter().copied());
            iters += 1;
            self.stats.loop_iterations += 1;
            if self.loop_trace.is_some() {
                let d = self.deletions.last().expect("loop scope");
                trace.push(self.g.edges().union(d).count());
            }
            if !seen.insert(self.g.fingerprint()) {
                break Ok(());
            }
            if iters >= self.config.max_iters {
                self.ceiling(span, "loop");
                break Ok(());
            }
        };
        self.reinsert_deletions();
        self.deletions.pop();
        self.exit_fix();
        if let Some(t) = self.loop_trace.as_mut() {
            t.push(trace);
        }
        res?;
        self.g.reroot(&roots)?;
        Ok(())
    }
}
