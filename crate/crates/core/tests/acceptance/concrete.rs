//! Concrete heaps, enumerating every resolution of each choice. Guards
//! are guarded commands: a condition false on the real heap blocks that
//! execution, so `then (if c: p) else (if not c: q) end` runs exactly one
//! arm. A dereference of Void also aborts the execution.

use std::collections::{BTreeMap, BTreeSet};

use aliasgraph::lang::{Cond, Instr, InstrKind, Source};
use aliasgraph::PathExpr;

#[derive(Debug, Clone, Default)]
pub struct Heap {
    /// Object 0 is Current.
    fields: Vec<BTreeMap<String, usize>>,
}

impl Heap {
    pub fn new() -> Self {
        Heap { fields: vec![BTreeMap::new()] }
    }

    /// `Ok(None)` for Void; `Err` when an intermediate step is Void.
    pub fn eval(&self, p: &PathExpr) -> Result<Option<usize>, ()> {
        let mut cur = Some(0);
        for l in p.segments() {
            let o = cur.ok_or(())?;
            cur = self.fields[o].get(l.name()).copied();
        }
        Ok(cur)
    }

    fn assign(&mut self, target: &PathExpr, v: Option<usize>) -> Result<(), ()> {
        let last = target.last().expect("target").name().to_string();
        let obj = match target.parent() {
            None => 0,
            Some(parent) => self.eval(&parent)?.ok_or(())?,
        };
        match v {
            Some(o) => self.fields[obj].insert(last, o),
            None => self.fields[obj].remove(&last),
        };
        Ok(())
    }

    fn holds(&self, c: &Cond) -> Result<bool, ()> {
        Ok(match c {
            Cond::Eq(p, q) => self.eval(p)? == self.eval(q)?,
            Cond::Neq(p, q) => self.eval(p)? != self.eval(q)?,
            Cond::EqVoid(p) => self.eval(p)?.is_none(),
            Cond::NeqVoid(p) => self.eval(p)?.is_some(),
            Cond::Not(c) => !self.holds(c)?,
        })
    }
}

/// All heaps reachable by executing `instr` from each of `heaps`.
pub fn exec(heaps: Vec<Heap>, instr: &Instr) -> Vec<Heap> {
    heaps.into_iter().flat_map(|h| step(h, instr)).collect()
}

fn step(mut h: Heap, instr: &Instr) -> Vec<Heap> {
    match &instr.kind {
        InstrKind::Assign { target, source } => {
            let v = match source {
                Source::Path(p) => h.eval(p),
                Source::Void => Ok(None),
                Source::Call(_) => panic!("calls are outside the concrete semantics"),
            };
            match v.and_then(|v| h.assign(target, v)) {
                Ok(()) => vec![h],
                Err(()) => vec![],
            }
        }
        InstrKind::Create { target } => {
            h.fields.push(BTreeMap::new());
            let o = h.fields.len() - 1;
            match h.assign(&PathExpr::single(target.clone()), Some(o)) {
                Ok(()) => vec![h],
                Err(()) => vec![],
            }
        }
        InstrKind::Compound(v) => v.iter().fold(vec![h], exec),
        InstrKind::Choice(bs) => bs.iter().flat_map(|b| step(h.clone(), b)).collect(),
        InstrKind::Guard { cond, body } => match h.holds(cond) {
            Ok(true) => step(h, body),
            Ok(false) | Err(()) => vec![],
        },
        InstrKind::Loop { .. } | InstrKind::Call(_) => panic!("loops and calls are outside the concrete semantics"),
    }
}

/// Unordered pairs of distinct universe paths attached to the same object
/// in some heap.
pub fn alias_pairs<'a>(heaps: &[Heap], universe: impl Iterator<Item = &'a PathExpr> + Clone) -> BTreeSet<(PathExpr, PathExpr)> {
    let mut out = BTreeSet::new();
    for h in heaps {
        let vals: Vec<(&PathExpr, usize)> =
            universe.clone().filter_map(|p| h.eval(p).ok().flatten().map(|o| (p, o))).collect();
        for (i, (p, a)) in vals.iter().enumerate() {
            for (q, b) in &vals[i + 1..] {
                if a == b && p != q {
                    let pair = if p < q { ((*p).clone(), (*q).clone()) } else { ((*q).clone(), (*p).clone()) };
                    out.insert(pair);
                }
            }
        }
    }
    out
}
