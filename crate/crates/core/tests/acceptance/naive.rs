//! Reference semantics without sharing: every choice copies the whole
//! state once per branch, so the result is a list of independent worlds,
//! one per resolution path. Loops are the explicit union of the states
//! after 0, 1, 2, … iterations.

use std::collections::BTreeSet;

use aliasgraph::lang::{Cond, Instr, InstrKind, Source};
use aliasgraph::PathExpr;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct World {
    pub root: u32,
    pub edges: BTreeSet<(String, u32, u32)>,
    next: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Unknown,
}

impl World {
    pub fn new() -> Self {
        World { root: 0, edges: BTreeSet::new(), next: 1 }
    }

    pub fn values(&self, p: &PathExpr) -> BTreeSet<u32> {
        let mut cur = BTreeSet::from([self.root]);
        for l in p.segments() {
            cur = self
                .edges
                .iter()
                .filter(|(name, s, _)| name == l.name() && cur.contains(s))
                .map(|&(_, _, t)| t)
                .collect();
        }
        cur
    }

    fn set(&mut self, source: u32, label: &str, targets: &BTreeSet<u32>, strong: bool) {
        if strong {
            self.edges.retain(|(l, s, _)| !(l == label && *s == source));
        }
        for &t in targets {
            self.edges.insert((label.to_string(), source, t));
        }
    }

    fn assign(&mut self, target: &PathExpr, src: BTreeSet<u32>) {
        let last = target.last().expect("target").name().to_string();
        match target.parent() {
            None => {
                let root = self.root;
                self.set(root, &last, &src, true);
            }
            Some(parent) => {
                let objs = self.values(&parent);
                let strong = objs.len() == 1;
                for o in objs {
                    self.set(o, &last, &src, strong);
                }
            }
        }
    }

    fn eval(&self, c: &Cond) -> Truth {
        let flip = |t| match t {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        };
        match c {
            Cond::Eq(p, q) => {
                let (vp, vq) = (self.values(p), self.values(q));
                if p == q {
                    Truth::True
                } else if !vp.is_empty() && !vq.is_empty() && vp.is_disjoint(&vq) {
                    Truth::False
                } else {
                    Truth::Unknown
                }
            }
            Cond::Neq(p, q) => flip(self.eval(&Cond::Eq(p.clone(), q.clone()))),
            Cond::EqVoid(p) => {
                if self.values(p).is_empty() {
                    Truth::True
                } else {
                    Truth::Unknown
                }
            }
            Cond::NeqVoid(p) => flip(self.eval(&Cond::EqVoid(p.clone()))),
            Cond::Not(c) => flip(self.eval(c)),
        }
    }

    fn union(&mut self, other: &World) {
        self.edges.extend(other.edges.iter().cloned());
    }
}

/// Runs `instr` on every world.
pub fn exec(worlds: Vec<World>, instr: &Instr) -> Vec<World> {
    match &instr.kind {
        InstrKind::Assign { target, source } => worlds
            .into_iter()
            .map(|mut w| {
                let src = match source {
                    Source::Path(p) => w.values(p),
                    Source::Void => BTreeSet::new(),
                    Source::Call(_) => panic!("calls are outside the reference semantics"),
                };
                w.assign(target, src);
                w
            })
            .collect(),
        InstrKind::Create { target } => worlds
            .into_iter()
            .map(|mut w| {
                let n = w.next;
                w.next += 1;
                w.assign(&PathExpr::single(target.clone()), BTreeSet::from([n]));
                w
            })
            .collect(),
        InstrKind::Compound(v) => v.iter().fold(worlds, exec),
        InstrKind::Choice(branches) => branches.iter().flat_map(|b| exec(worlds.clone(), b)).collect(),
        InstrKind::Guard { cond, body } => worlds
            .into_iter()
            .flat_map(|w| if w.eval(cond) == Truth::False { vec![w] } else { exec(vec![w], body) })
            .collect(),
        InstrKind::Loop { body } => worlds.into_iter().map(|w| iterate_union(w, body)).collect(),
        InstrKind::Call(_) => panic!("calls are outside the reference semantics"),
    }
}

/// ∪ G_i with G_0 = `w` and G_{i+1} = body(G_i); the body must be
/// deterministic (one world in, one out).
pub fn iterate_union(w: World, body: &Instr) -> World {
    let mut seen = vec![w.clone()];
    let mut acc = w.clone();
    let mut cur = w;
    loop {
        let mut next = exec(vec![cur], body);
        assert_eq!(next.len(), 1, "loop bodies must be deterministic");
        cur = next.pop().expect("one world");
        if seen.contains(&cur) {
            return acc;
        }
        acc.union(&cur);
        seen.push(cur.clone());
    }
}

/// Paths of `universe` aliased to `p` in some world (excluding `p`).
pub fn alias_set<'a>(worlds: &[World], p: &PathExpr, universe: impl Iterator<Item = &'a PathExpr> + Clone) -> BTreeSet<PathExpr> {
    let mut out = BTreeSet::new();
    for w in worlds {
        let vp = w.values(p);
        if vp.is_empty() {
            continue;
        }
        for q in universe.clone() {
            if q != p && !w.values(q).is_disjoint(&vp) {
                out.insert(q.clone());
            }
        }
    }
    out
}
