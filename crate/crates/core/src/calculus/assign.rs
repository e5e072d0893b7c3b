use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::cmp::Ordering;

use crate::diagram::{Label, NodeId, PathExpr};
use crate::lang::Instr;

use super::choice::BranchFn;
use super::{Analyzer, Res, RootSets};

/// Choice sites of per-root splits, kept apart from instruction-level
/// choices in the clone memo.
const SPLIT_SITE: u32 = 1 << 31;

/// One root's share of a qualified update.
struct RootUpdate {
    objects: BTreeSet<NodeId>,
    src: BTreeSet<NodeId>,
    strong: bool,
}

impl<'p> Analyzer<'p> {
    /// `target := src`, with `src` given per root. Single labels are
    /// relinked from each root. `x.a` updates every object of `V_r(x)`,
    /// strongly when that is one non-summary object. When roots share an
    /// object but disagree on its update, the assignment is split into a
    /// choice with one branch per root so components stay separate.
    pub(super) fn assign_sets(&mut self, instr: &Instr, target: &PathExpr, src: &RootSets) -> Res {
        let last = target.last().expect("assignment target").clone();
        if target.len() == 1 {
            self.relink_roots(&last, src);
            return Ok(());
        }
        let parent = target.parent().expect("qualified target");
        let updates: BTreeMap<NodeId, RootUpdate> = self
            .roots()
            .into_iter()
            .map(|r| {
                let objects = self.v(r, &parent);
                let strong = objects.len() == 1 && objects.iter().all(|&o| !self.g.is_summary(o));
                (r, RootUpdate { objects, src: src.get(&r).cloned().unwrap_or_default(), strong })
            })
            .collect();
        if updates.values().all(|u| u.objects.is_empty()) {
            self.warn(instr.span, format!("assignment to `{target}` through void `{parent}` has no effect"));
            return Ok(());
        }
        if updates.len() > 1 && self.updates_conflict(&updates) {
            return self.split_per_root(instr, target, src);
        }
        let mut done = BTreeSet::new();
        for u in updates.values() {
            for &o in &u.objects {
                if done.insert(o) {
                    if u.strong {
                        self.g.relink_from(o, &last, &u.src);
                    } else {
                        self.g.link_from(o, &last, &u.src);
                    }
                }
            }
        }
        Ok(())
    }

    fn relink_roots(&mut self, label: &Label, src: &RootSets) {
        let empty = BTreeSet::new();
        let strong = self.frame().strong_roots || self.frame().scope.contains(label);
        for r in self.roots() {
            let s = src.get(&r).unwrap_or(&empty);
            if strong {
                self.g.relink_from(r, label, s);
            } else {
                self.g.link_from(r, label, s);
            }
        }
    }

    /// Nodes reachable from `r` along user labels.
    fn user_reach(&self, r: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([r]);
        let mut queue = VecDeque::from([r]);
        while let Some(n) = queue.pop_front() {
            for e in self.g.edges_from(n).filter(|e| e.label.is_user()) {
                if seen.insert(e.target) {
                    queue.push_back(e.target);
                }
            }
        }
        seen
    }

    /// An object gets different updates from different roots, or is
    /// visible from a root that does not update it.
    fn updates_conflict(&self, updates: &BTreeMap<NodeId, RootUpdate>) -> bool {
        let mut owner: BTreeMap<NodeId, &RootUpdate> = BTreeMap::new();
        for u in updates.values() {
            for &o in &u.objects {
                match owner.get(&o) {
                    Some(prev) if prev.src != u.src || prev.strong != u.strong => return true,
                    Some(_) => {}
                    None => {
                        owner.insert(o, u);
                    }
                }
            }
        }
        updates.iter().any(|(&r, u)| {
            let reach = self.user_reach(r);
            owner.keys().any(|o| reach.contains(o) && !u.objects.contains(o))
        })
    }

    fn split_per_root(&mut self, instr: &Instr, target: &PathExpr, src: &RootSets) -> Res {
        let branches: Vec<(BTreeSet<NodeId>, BranchFn<'_, 'p>)> = self
            .roots()
            .into_iter()
            .map(|r| {
                let one: RootSets = src.get(&r).map(|s| (r, s.clone())).into_iter().collect();
                let run: BranchFn<'_, 'p> = Box::new(move |a: &mut Analyzer<'p>| a.assign_sets(instr, target, &one));
                (BTreeSet::from([r]), run)
            })
            .collect();
        self.choice(SPLIT_SITE | instr.point.id, branches)
    }

    /// `create x`: a fresh node per root outside fixpoints; inside, the
    /// site's first `cap` creations are fresh and later ones reuse the
    /// site's summary node (also reachable through the site's fresh label).
    pub(super) fn create(&mut self, site: u32, target: &Label) {
        let cap = self.config.cap.max(1);
        let roots = self.roots();
        let src: RootSets = match self.policy.as_mut() {
            None => roots.into_iter().map(|r| (r, BTreeSet::from([self.g.include()]))).collect(),
            Some(p) => {
                let k = p.counters.entry(site).or_insert(0);
                *k += 1;
                let node = match (*k).cmp(&cap) {
                    Ordering::Less => self.g.include(),
                    Ordering::Equal => {
                        let n = self.g.include();
                        self.g.mark_summary(n);
                        p.site_summary.insert(site, n);
                        let fx = Label::fresh(&site.to_string());
                        for &r in &roots {
                            self.g.link_from(r, &fx, &BTreeSet::from([n]));
                        }
                        n
                    }
                    Ordering::Greater => p.site_summary[&site],
                };
                roots.into_iter().map(|r| (r, BTreeSet::from([node]))).collect()
            }
        };
        self.relink_roots(target, &src);
    }
}
