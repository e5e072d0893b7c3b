use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{Delta, Edge, Label, NodeId, PathExpr};
use crate::lang::{Call, Diagnostic, DispatchTarget, Instr, Span};

use super::choice::BranchFn;
use super::{Analyzer, CallKey, Frame, Res, RootSets};

type Actuals = BTreeMap<NodeId, Vec<BTreeSet<NodeId>>>;

fn result_label() -> Label {
    Label::user("Result")
}

/// `Result` targets per source node of a triple set.
fn summary_sets(summary: &BTreeSet<Edge>) -> RootSets {
    let mut out = RootSets::new();
    for e in summary {
        out.entry(e.source).or_default().insert(e.target);
    }
    out
}

impl<'p> Analyzer<'p> {
    /// Versions a call may reach: the routine seen from the dynamic class
    /// for unqualified calls, every redefinition below the static type for
    /// qualified ones.
    fn versions(&self, call: &Call) -> Vec<DispatchTarget<'p>> {
        let program: &'p crate::lang::Program = self.program;
        let f = self.frame();
        match &call.target {
            None => program
                .find_routine(f.class, &call.routine)
                .map(|(declared_in, routine)| DispatchTarget { class: f.class, declared_in, routine })
                .into_iter()
                .collect(),
            Some(x) => {
                let Some(ty) = program.type_of(f.declared_in, f.routine, x) else {
                    return Vec::new();
                };
                match program.class(&ty) {
                    Some(c) => program.heirs_redefining(&c.name, &call.routine),
                    None => Vec::new(),
                }
            }
        }
    }

    /// A call instruction, or `result := call`. Several reachable versions
    /// turn into a choice with one branch per version.
    pub(super) fn call_instr(&mut self, instr: &'p Instr, call: &'p Call, result: Option<&'p PathExpr>) -> Res {
        let span = instr.span;
        let versions = self.versions(call);
        match versions.as_slice() {
            [] => {
                self.diagnostics.push(Diagnostic::error(span, format!("no version of `{}` to call", call.routine)));
                Ok(())
            }
            [v] => self.call_version(instr, call, *v, result),
            _ => {
                let roots = self.g.roots().clone();
                let fns: Vec<(BTreeSet<NodeId>, BranchFn<'_, 'p>)> = versions
                    .into_iter()
                    .map(|v| {
                        let run: BranchFn<'_, 'p> = Box::new(move |a: &mut Analyzer<'p>| a.call_version(instr, call, v, result));
                        (roots.clone(), run)
                    })
                    .collect();
                self.choice(instr.point.id, fns)
            }
        }
    }

    fn call_version(&mut self, instr: &'p Instr, call: &'p Call, v: DispatchTarget<'p>, result: Option<&'p PathExpr>) -> Res {
        let span = instr.span;
        self.stats.calls += 1;
        let Some(x) = &call.target else {
            let actuals: Actuals = self
                .roots()
                .into_iter()
                .map(|r| (r, call.actuals.iter().map(|a| self.v(r, a)).collect()))
                .collect();
            let strong = self.frame().strong_roots;
            let (_, results) = self.invoke(span, v, actuals, strong, None)?;
            return match result {
                Some(t) => self.assign_sets(instr, t, &results),
                None => Ok(()),
            };
        };

        let per = self.per_root(x);
        let targets: BTreeSet<NodeId> = per.values().flatten().copied().collect();
        if targets.is_empty() {
            self.diagnostics.push(Diagnostic::error(span, format!("call `{x}.{}` on a void target", call.routine)));
            return Ok(());
        }
        let caller_roots = self.g.roots().clone();
        let xp = Label::primed(x, self.frames.len() as u32);
        for (r, set) in &per {
            for &o in set {
                self.g.add_edge(Edge::new(xp.clone(), o, *r));
            }
        }
        let strong = targets.len() == 1 && targets.iter().all(|&n| !self.g.is_summary(n));
        let prefixed: Vec<PathExpr> = call.actuals.iter().map(|a| PathExpr::single(xp.clone()).concat(a)).collect();
        self.g.reroot(&targets)?;
        let actuals: Actuals = targets.iter().map(|&n| (n, prefixed.iter().map(|p| self.v(n, p)).collect())).collect();
        let (back, results) = self.invoke(span, v, actuals, strong, Some(caller_roots))?;
        let mut mapped = RootSets::new();
        for n in self.roots() {
            let res = results.get(&n).cloned().unwrap_or_default();
            for r in self.g.successors(n, &xp).collect::<Vec<_>>() {
                mapped.entry(r).or_default().extend(res.iter().copied());
            }
        }
        self.g.reroot(&back.expect("qualified call keeps its caller roots"))?;
        self.g.remove_label(&xp);
        match result {
            Some(t) => self.assign_sets(instr, t, &mapped),
            None => Ok(()),
        }
    }

    /// Runs one activation of `v` on the current roots with formals bound
    /// per root. Returns the caller roots (updated with any clones made
    /// meanwhile) and the `Result` targets per callee root.
    fn invoke(
        &mut self,
        span: Span,
        v: DispatchTarget<'p>,
        actuals: Actuals,
        strong: bool,
        caller_roots: Option<BTreeSet<NodeId>>,
    ) -> Res<(Option<BTreeSet<NodeId>>, RootSets)> {
        let roots = self.g.roots().clone();
        let key = CallKey {
            class: v.declared_in.to_string(),
            routine: v.routine.name.clone(),
            roots: roots.clone(),
            actuals: actuals.clone(),
        };
        if let Some(f) = self.frames.iter_mut().rev().find(|f| f.key.as_ref() == Some(&key)) {
            f.dirty = true;
            return Ok((caller_roots, summary_sets(&f.summary)));
        }
        if self.frames.len() >= self.config.max_depth {
            let same = |f: &&mut Frame<'p>| f.routine.name == v.routine.name && f.declared_in == v.declared_in;
            if let Some(f) = self.frames.iter_mut().rev().find(same) {
                f.dirty = true;
                let all: BTreeSet<NodeId> = f.summary.iter().map(|e| e.target).collect();
                let res = roots.iter().map(|&r| (r, all.clone())).collect();
                self.warn(span, format!("call depth limit reached; recursion through `{}` folded", v.routine.name));
                return Ok((caller_roots, res));
            }
        }

        let scope = v.routine.scope_labels();
        let mut saved = BTreeSet::new();
        for &r in &roots {
            for l in &scope {
                saved.extend(self.g.unlink_from(r, l));
            }
        }
        let formals: Vec<Label> = v.routine.formals.iter().map(|d| Label::user(&d.name)).collect();
        for (r, sets) in &actuals {
            for (f, s) in formals.iter().zip(sets) {
                self.g.link_from(*r, f, s);
            }
        }
        self.frames.push(Frame {
            class: v.class,
            declared_in: v.declared_in,
            routine: v.routine,
            key: Some(key),
            scope: scope.clone(),
            strong_roots: strong,
            saved,
            caller_roots,
            summary: BTreeSet::new(),
            dirty: false,
        });
        self.stats.max_depth = self.stats.max_depth.max(self.frames.len());

        self.g.push_journal();
        let res = self.apply(&v.routine.body);
        let delta = self.g.commit_journal();
        let res = res.and_then(|_| if self.frame().dirty { self.recurse(span, &v.routine.body, delta) } else { Ok(()) });

        let mut results = RootSets::new();
        if v.routine.is_function() {
            let summary = summary_sets(&self.frame().summary);
            for r in self.roots() {
                let mut s = self.v(r, &PathExpr::single(result_label()));
                s.extend(summary.get(&r).into_iter().flatten().copied());
                results.insert(r, s);
            }
        }
        for r in self.roots() {
            for l in &scope {
                self.g.unlink_from(r, l);
            }
        }
        let frame = self.frames.pop().expect("balanced frames");
        for e in frame.saved {
            if self.g.contains_node(e.source) && self.g.contains_node(e.target) {
                self.g.add_edge(e);
            }
        }
        res?;
        Ok((frame.caller_roots, results))
    }

    fn add_summary(&mut self) {
        if !self.frame().routine.is_function() {
            return;
        }
        let rl = result_label();
        let res = PathExpr::single(rl.clone());
        let triples: Vec<Edge> = self
            .roots()
            .into_iter()
            .flat_map(|r| self.v(r, &res).into_iter().map(move |t| (r, t)))
            .map(|(r, t)| Edge::new(rl.clone(), r, t))
            .collect();
        self.frames.last_mut().expect("active frame").summary.extend(triples);
    }

    /// Re-runs the body of a routine that called itself with the same
    /// context until the diagram and its `Result` summary are stable,
    /// keeping every deleted edge (monotone union of the passes).
    fn recurse(&mut self, span: Span, body: &'p Instr, first: Delta) -> Res {
        self.enter_fix();
        self.deletions.push(first.removed);
        self.add_summary();
        self.reinsert_deletions();
        let mut passes = 0u32;
        let res = loop {
            let before = (self.g.fingerprint(), self.frame().summary.clone());
            self.g.push_journal();
            let res = self.apply(body);
            let delta = self.g.commit_journal();
            if let Err(e) = res {
                break Err(e);
            }
            self.deletions.last_mut().expect("recursion scope").extend(delta.removed);
            self.reinsert_deletions();
            self.add_summary();
            passes += 1;
            self.stats.recursion_passes += 1;
            if self.g.fingerprint() == before.0 && self.frame().summary == before.1 {
                break Ok(());
            }
            if passes >= self.config.max_iters {
                self.ceiling(span, "recursion");
                break Ok(());
            }
        };
        self.deletions.pop();
        self.exit_fix();
        res
    }
}
