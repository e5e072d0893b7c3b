use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::diagram::{Delta, Edge, NodeId};
use crate::lang::{Cond, Instr};

use super::{Analyzer, Res, Truth};

/// Net effect of one branch, measured against the pre-choice diagram.
struct Outcome {
    delta: Delta,
    roots: BTreeSet<NodeId>,
    /// Node ids allocated while the branch ran.
    private: std::ops::Range<u32>,
}

/// Clones that make one later branch's component.
struct ClonePlan {
    map: BTreeMap<NodeId, NodeId>,
    edges: Vec<Edge>,
    roots: BTreeSet<NodeId>,
}

pub(super) type BranchFn<'a, 'p> = Box<dyn FnMut(&mut Analyzer<'p>) -> Res + 'a>;

impl<'p> Analyzer<'p> {
    pub(super) fn choice_instr(&mut self, site: u32, branches: &'p [Instr]) -> Res {
        let roots = self.g.roots().clone();
        let fns = branches
            .iter()
            .map(|b| (roots.clone(), Box::new(move |a: &mut Analyzer<'p>| a.apply(b)) as BranchFn<'_, 'p>))
            .collect();
        self.choice(site, fns)
    }

    /// `if c: body` — runs `body` on the roots where `c` may hold. When the
    /// condition splits the roots, the excluded components must not see the
    /// body's effect, so it becomes a choice between skip and body.
    pub(super) fn guard(&mut self, site: u32, cond: &Cond, body: &'p Instr) -> Res {
        let (mut inc, mut exc) = (BTreeSet::new(), BTreeSet::new());
        for r in self.roots() {
            if self.evaluate_cond(r, cond) == Truth::False {
                exc.insert(r);
            } else {
                inc.insert(r);
            }
        }
        if inc.is_empty() {
            return Ok(());
        }
        if exc.is_empty() {
            return self.apply(body);
        }
        let branches: Vec<(BTreeSet<NodeId>, BranchFn<'_, 'p>)> =
            vec![(exc, Box::new(|_: &mut Analyzer<'p>| Ok(()))), (inc, Box::new(move |a: &mut Analyzer<'p>| a.apply(body)))];
        self.choice(site, branches)
    }

    /// Runs each branch from the same starting diagram (rerooted to its
    /// root set), restores the start after each, then keeps branch 1 in
    /// place and materialises every differing later branch as clones.
    pub(super) fn choice(&mut self, site: u32, mut branches: Vec<(BTreeSet<NodeId>, BranchFn<'_, 'p>)>) -> Res {
        self.stats.choices += 1;
        let r0 = self.g.roots().clone();
        let start = self.config.check_restore.then(|| self.g.edges().clone());
        let mut outcomes = Vec::with_capacity(branches.len());
        for (roots, run) in branches.iter_mut() {
            let lo = self.g.id_watermark();
            self.g.reroot(roots)?;
            self.g.push_journal();
            let res = run(self);
            let delta = self.g.pop_journal();
            let end_roots = self.g.roots().clone();
            self.g.revert_unlogged(&delta);
            self.g.reroot(&r0)?;
            res?;
            if start.as_ref().is_some_and(|e| e != self.g.edges()) {
                self.stats.restore_violations += 1;
            }
            outcomes.push(Outcome { delta, roots: end_roots, private: lo..self.g.id_watermark() });
        }
        let first = &outcomes[0];
        let mut final_roots = first.roots.clone();
        let mut plans = Vec::new();
        for (b, o) in outcomes.iter().enumerate().skip(1) {
            if o.delta == first.delta {
                final_roots.extend(o.roots.iter().copied());
            } else {
                plans.push(self.plan_clone(site, b, first, o));
            }
        }
        for e in &first.delta.removed {
            self.g.remove_edge(e);
        }
        for e in &first.delta.added {
            self.g.add_edge(e.clone());
        }
        for plan in plans {
            for e in plan.edges {
                self.g.add_edge(e);
            }
            final_roots.extend(plan.roots);
            self.propagate(&plan.map);
        }
        self.g.reroot(&final_roots)?;
        Ok(())
    }

    /// Follows clone-of links back to an original node.
    fn base_origin(&self, mut n: NodeId) -> NodeId {
        while let Some(&o) = self.clone_origin.get(&n) {
            if o == n {
                break;
            }
            n = o;
        }
        n
    }

    fn plan_clone(&mut self, site: u32, branch: usize, first: &Outcome, o: &Outcome) -> ClonePlan {
        let private = |n: &NodeId| o.private.contains(&n.0);
        // Reverse adjacency of G_b plus the context edges.
        let mut rev: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        let g_b = self.g.edges().iter().filter(|e| !o.delta.removed.contains(e)).chain(o.delta.added.iter());
        for e in g_b.chain(self.context_edges()) {
            rev.entry(e.target).or_default().push(e.source);
        }
        let mods: BTreeSet<NodeId> = first.delta.sources().union(&o.delta.sources()).copied().collect();
        let mut reach = mods.clone();
        let mut queue: VecDeque<NodeId> = mods.into_iter().collect();
        while let Some(n) = queue.pop_front() {
            for &s in rev.get(&n).into_iter().flatten() {
                if reach.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        let to_clone: BTreeSet<NodeId> =
            reach.into_iter().chain(o.roots.iter().copied()).filter(|n| !private(n) && self.g.contains_node(*n)).collect();

        let mut map = BTreeMap::new();
        for &c in &to_clone {
            let base = self.base_origin(c);
            let memo = self.policy.as_ref().and_then(|p| p.clone_memo.get(&(site, branch, base)).copied());
            let clone = match memo {
                Some(m) => m,
                None => {
                    let n = self.g.include();
                    self.stats.clones += 1;
                    if let Some(p) = self.policy.as_mut() {
                        p.clone_memo.insert((site, branch, base), n);
                        self.g.mark_summary(n);
                    }
                    self.clone_origin.insert(n, base);
                    n
                }
            };
            map.insert(c, clone);
        }
        let m = |n: NodeId| *map.get(&n).unwrap_or(&n);
        let mut edges = Vec::new();
        for &c in &to_clone {
            let outs = self
                .g
                .edges_from(c)
                .filter(|e| !o.delta.removed.contains(e))
                .chain(o.delta.added.iter().filter(|e| e.source == c));
            edges.extend(outs.map(|e| Edge::new(e.label.clone(), m(c), m(e.target))));
        }
        for e in o.delta.added.iter().filter(|e| private(&e.source)) {
            edges.push(Edge::new(e.label.clone(), e.source, m(e.target)));
        }
        let roots = o.roots.iter().map(|&r| m(r)).collect();
        ClonePlan { map, edges, roots }
    }
}
