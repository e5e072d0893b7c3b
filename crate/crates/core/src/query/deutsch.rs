//! Bounded checks of the list-copying properties. Every check looks at
//! `tl`-chains up to depth `k`, so a violation at `k` persists at `k + 1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::calculus::Analysis;
use crate::diagram::{AliasDiagram, Label, NodeId, PathExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// `p.tl.tl…` with `i` tails.
fn tails(p: &PathExpr, tl: &Label, i: usize) -> PathExpr {
    (0..i).fold(p.clone(), |acc, _| acc.push(tl.clone()))
}

fn head(p: &PathExpr, hd: &Label, tl: &Label, i: usize) -> PathExpr {
    tails(p, tl, i).push(hd.clone())
}

/// True when `n` can reach itself along one or more `via` edges.
fn on_cycle(g: &AliasDiagram, n: NodeId, via: &Label) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = g.successors(n, via).collect();
    while let Some(m) = queue.pop_front() {
        if m == n {
            return true;
        }
        if seen.insert(m) {
            queue.extend(g.successors(m, via));
        }
    }
    false
}

/// P1: no node within `k` `via`-steps of `p` lies on a `via`-cycle.
pub fn check_acyclic(g: &AliasDiagram, p: &PathExpr, via: &Label, k: usize) -> bool {
    let mut frontier = g.value_set(p);
    let mut reached = frontier.clone();
    for _ in 0..k {
        frontier = frontier.iter().flat_map(|&n| g.successors(n, via)).filter(|n| !reached.contains(n)).collect();
        reached.extend(frontier.iter().copied());
    }
    reached.into_iter().all(|n| !on_cycle(g, n, via))
}

/// P2: successive heads of `y` are never aliased.
pub fn p2(g: &AliasDiagram, y: &PathExpr, hd: &Label, tl: &Label, k: usize) -> bool {
    (0..k).all(|i| !g.may_alias(&head(y, hd, tl, i), &head(y, hd, tl, i + 1)))
}

/// P3: no tail of `x` is aliased to a tail of `y`.
pub fn p3(g: &AliasDiagram, x: &PathExpr, y: &PathExpr, tl: &Label, k: usize) -> bool {
    (1..=k).all(|i| (1..=k).all(|j| !g.may_alias(&tails(x, tl, i), &tails(y, tl, j))))
}

/// P4: heads of `x` and `y` are aliased only at equal positions.
pub fn check_pairwise_heads(g: &AliasDiagram, x: &PathExpr, y: &PathExpr, hd: &Label, tl: &Label, k: usize) -> bool {
    (0..=k).all(|i| (0..=k).all(|j| i == j || !g.may_alias(&head(x, hd, tl, i), &head(y, hd, tl, j))))
}

/// P5: no head of `y` is aliased to `y` or one of its tails.
pub fn p5(g: &AliasDiagram, y: &PathExpr, hd: &Label, tl: &Label, k: usize) -> bool {
    (0..=k).all(|i| (0..=k).all(|j| !g.may_alias(&head(y, hd, tl, i), &tails(y, tl, j))))
}

/// Names used by the copying benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeutschNames {
    pub x: String,
    pub y: String,
    pub hd: String,
    pub tl: String,
    /// Point after the copy (P1–P4).
    pub after_copy: String,
    /// Point after `x` is re-created (P5).
    pub after_reset: String,
}

impl Default for DeutschNames {
    fn default() -> Self {
        DeutschNames {
            x: "X".into(),
            y: "Y".into(),
            hd: "hd".into(),
            tl: "tl".into(),
            after_copy: "L2".into(),
            after_reset: "L3".into(),
        }
    }
}

/// P1–P5 at depth `k`. A property holds at a point when it holds in every
/// diagram recorded there; missing points fall back to the final diagram.
pub fn deutsch_properties(analysis: &Analysis, names: &DeutschNames, k: usize) -> BTreeMap<String, Verdict> {
    let at = |l: &str| -> Vec<&AliasDiagram> {
        match analysis.snapshots.get(l) {
            Some(v) if !v.is_empty() => v.iter().collect(),
            _ => vec![&analysis.diagram],
        }
    };
    let (x, y) = (PathExpr::parse(&names.x), PathExpr::parse(&names.y));
    let (hd, tl) = (Label::user(&names.hd), Label::user(&names.tl));
    let copy = at(&names.after_copy);
    let reset = at(&names.after_reset);
    let all = |gs: &[&AliasDiagram], f: &dyn Fn(&AliasDiagram) -> bool| Verdict::from(gs.iter().all(|g| f(g)));
    BTreeMap::from([
        ("P1".to_string(), all(&copy, &|g| check_acyclic(g, &x, &tl, k) && check_acyclic(g, &y, &tl, k))),
        ("P2".to_string(), all(&copy, &|g| p2(g, &y, &hd, &tl, k))),
        ("P3".to_string(), all(&copy, &|g| p3(g, &x, &y, &tl, k))),
        ("P4".to_string(), all(&copy, &|g| check_pairwise_heads(g, &x, &y, &hd, &tl, k))),
        ("P5".to_string(), all(&reset, &|g| p5(g, &y, &hd, &tl, k))),
    ])
}
