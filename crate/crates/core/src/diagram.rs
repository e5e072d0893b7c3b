//! Alias diagrams: rooted, labelled directed multigraphs abstracting run-time
//! object structures.
//!
//! A diagram holds a finite set of abstract objects (nodes), a non-empty set
//! of roots standing for the current object, and a set of labelled edges
//! `(label, source, target)`. A path expression `a.b.c` denotes the set of
//! nodes reached from the roots by following edges labelled `a`, then `b`,
//! then `c`; two expressions may be aliased when those sets intersect.
//!
//! Edges are stored as a flat triple set with a `(source, label)` index.
//! Every edge insertion or removal is recorded into the innermost open
//! [`Delta`] journal, which is how the calculus restores and replays branch
//! states.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Abstract object identifier, drawn from a per-analysis monotone counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    /// Attribute, local, formal or `Result`.
    User,
    /// Back-pointer `x'` introduced by a qualified call at the given nesting depth.
    Primed { depth: u32 },
    /// Fresh alias variable `fx` attached to a creation site.
    Fresh,
}

/// Edge label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    name: Arc<str>,
    kind: LabelKind,
}

impl Label {
    pub fn user(name: &str) -> Self {
        Label { name: Arc::from(name), kind: LabelKind::User }
    }

    /// Back-pointer label for the call target `base`.
    pub fn primed(base: &PathExpr, depth: u32) -> Self {
        Label { name: Arc::from(base.to_string().as_str()), kind: LabelKind::Primed { depth } }
    }

    pub fn fresh(site: &str) -> Self {
        Label { name: Arc::from(site), kind: LabelKind::Fresh }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn is_user(&self) -> bool {
        self.kind == LabelKind::User
    }

    pub fn is_primed(&self) -> bool {
        matches!(self.kind, LabelKind::Primed { .. })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LabelKind::User => write!(f, "{}", self.name),
            LabelKind::Primed { depth: 0 | 1 } => write!(f, "{}'", self.name),
            LabelKind::Primed { depth } => write!(f, "{}'{}", self.name, depth),
            LabelKind::Fresh => write!(f, "f_{}", self.name),
        }
    }
}

/// A dotted sequence of labels. The empty path is `Current`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PathExpr(Vec<Label>);

impl PathExpr {
    pub fn current() -> Self {
        PathExpr(Vec::new())
    }

    pub fn new(segments: Vec<Label>) -> Self {
        PathExpr(segments)
    }

    /// Parses `a.b.c` into user labels. `Current` segments are dropped, so
    /// `Current.a` and `a.Current` both denote `a`.
    pub fn parse(text: &str) -> Self {
        PathExpr(
            text.split('.')
                .map(str::trim)
                .filter(|s| !s.is_empty() && *s != "Current")
                .map(Label::user)
                .collect(),
        )
    }

    pub fn single(label: Label) -> Self {
        PathExpr(vec![label])
    }

    pub fn segments(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_current(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &PathExpr) -> PathExpr {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        PathExpr(v)
    }

    pub fn push(&self, label: Label) -> PathExpr {
        let mut v = self.0.clone();
        v.push(label);
        PathExpr(v)
    }

    pub fn first(&self) -> Option<&Label> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&Label> {
        self.0.last()
    }

    /// All but the last segment.
    pub fn parent(&self) -> Option<PathExpr> {
        if self.0.is_empty() {
            None
        } else {
            Some(PathExpr(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Non-empty prefixes, shortest first, including the path itself.
    pub fn prefixes(&self) -> impl Iterator<Item = PathExpr> + '_ {
        (1..=self.0.len()).map(move |n| PathExpr(self.0[..n].to_vec()))
    }

    /// True when `self = prefix.q` for a non-empty `q`.
    pub fn strictly_extends(&self, prefix: &PathExpr) -> bool {
        self.0.len() > prefix.0.len() && self.0.starts_with(&prefix.0)
    }

    pub fn is_user(&self) -> bool {
        self.0.iter().all(Label::is_user)
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Current");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Prefix-closed set of the path expressions a program mentions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExprUniverse {
    exprs: BTreeSet<PathExpr>,
}

impl ExprUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_exprs<I: IntoIterator<Item = PathExpr>>(exprs: I) -> Self {
        let mut u = Self::new();
        for e in exprs {
            u.insert(&e);
        }
        u
    }

    /// Inserts `e` and all its prefixes. `Current` is never a member.
    pub fn insert(&mut self, e: &PathExpr) {
        for p in e.prefixes() {
            self.exprs.insert(p);
        }
    }

    pub fn contains(&self, e: &PathExpr) -> bool {
        self.exprs.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PathExpr> {
        self.exprs.iter()
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    /// Completion paths of `p`: members of the universe extending `p` by at
    /// least one label.
    pub fn compl(&self, p: &PathExpr) -> BTreeSet<PathExpr> {
        self.exprs.iter().filter(|w| w.strictly_extends(p)).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: NodeId,
    pub label: Label,
    pub target: NodeId,
}

impl Edge {
    pub fn new(label: Label, source: NodeId, target: NodeId) -> Self {
        Edge { source, label, target }
    }
}

/// Net edge additions and deletions recorded since a journal was opened.
/// An edge that is added then removed (or removed then re-added) appears in
/// neither set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Delta {
    pub added: BTreeSet<Edge>,
    pub removed: BTreeSet<Edge>,
}

impl Delta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    fn record_add(&mut self, e: &Edge) {
        if !self.removed.remove(e) {
            self.added.insert(e.clone());
        }
    }

    fn record_remove(&mut self, e: &Edge) {
        if !self.added.remove(e) {
            self.removed.insert(e.clone());
        }
    }

    /// Sources of every recorded edge.
    pub fn sources(&self) -> BTreeSet<NodeId> {
        self.added.iter().chain(self.removed.iter()).map(|e| e.source).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("node {0} is not in the diagram")]
    UnknownNode(NodeId),
    #[error("an alias diagram needs at least one root")]
    EmptyRoots,
    #[error("bulk link with {formals} formals but {actuals} actuals")]
    LengthMismatch { formals: usize, actuals: usize },
    #[error("target `{0}` is void in every state")]
    VoidTarget(PathExpr),
}

/// Rooted labelled multigraph. See the module documentation.
#[derive(Debug, Clone)]
pub struct AliasDiagram {
    nodes: BTreeSet<NodeId>,
    roots: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
    out: HashMap<(NodeId, Label), BTreeSet<NodeId>>,
    summaries: BTreeSet<NodeId>,
    next_id: u32,
    journal: Vec<Delta>,
}

impl PartialEq for AliasDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.roots == other.roots && self.edges == other.edges
    }
}

impl Eq for AliasDiagram {}

impl Default for AliasDiagram {
    fn default() -> Self {
        Self::new()
    }
}

impl AliasDiagram {
    /// A diagram with a single root `n0` and no edges.
    pub fn new() -> Self {
        let mut g = AliasDiagram {
            nodes: BTreeSet::new(),
            roots: BTreeSet::new(),
            edges: BTreeSet::new(),
            out: HashMap::new(),
            summaries: BTreeSet::new(),
            next_id: 0,
            journal: Vec::new(),
        };
        let root = g.include();
        g.roots.insert(root);
        g
    }

    /// Builds a diagram with explicit node ids: `edges` are
    /// `(label, source, target)`; every mentioned id becomes a node.
    pub fn from_edges(roots: &[u32], edges: &[(&str, u32, u32)]) -> Self {
        Self::from_parts(roots, &[], edges)
    }

    /// Like [`from_edges`](Self::from_edges) with extra isolated nodes.
    pub fn from_parts(roots: &[u32], isolated: &[u32], edges: &[(&str, u32, u32)]) -> Self {
        let mut g = AliasDiagram {
            nodes: BTreeSet::new(),
            roots: BTreeSet::new(),
            edges: BTreeSet::new(),
            out: HashMap::new(),
            summaries: BTreeSet::new(),
            next_id: 0,
            journal: Vec::new(),
        };
        let ids = roots
            .iter()
            .chain(isolated)
            .copied()
            .chain(edges.iter().flat_map(|&(_, s, t)| [s, t]));
        for id in ids {
            g.nodes.insert(NodeId(id));
            g.next_id = g.next_id.max(id + 1);
        }
        g.roots = roots.iter().map(|&r| NodeId(r)).collect();
        assert!(!g.roots.is_empty(), "diagram needs a root");
        for &(l, s, t) in edges {
            g.add_edge(Edge::new(Label::user(l), NodeId(s), NodeId(t)));
        }
        g
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn roots(&self) -> &BTreeSet<NodeId> {
        &self.roots
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn has_edge(&self, label: &Label, source: NodeId, target: NodeId) -> bool {
        self.out.get(&(source, label.clone())).is_some_and(|s| s.contains(&target))
    }

    pub fn is_summary(&self, n: NodeId) -> bool {
        self.summaries.contains(&n)
    }

    /// Marks a node as standing for possibly many concrete objects.
    pub fn mark_summary(&mut self, n: NodeId) {
        self.summaries.insert(n);
    }

    /// Out-edges of `source` labelled `label`.
    pub fn successors(&self, source: NodeId, label: &Label) -> impl Iterator<Item = NodeId> + '_ {
        self.out.get(&(source, label.clone())).into_iter().flat_map(|s| s.iter().copied())
    }

    /// All out-edges of `source`, ordered by label then target.
    pub fn edges_from(&self, source: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let lo = Edge::new(Label { name: Arc::from(""), kind: LabelKind::User }, source, NodeId(0));
        self.edges.range(lo..).take_while(move |e| e.source == source)
    }

    // ---- journaled primitive edits ----

    /// Inserts an edge; returns false if it was already present.
    pub fn add_edge(&mut self, e: Edge) -> bool {
        debug_assert!(self.nodes.contains(&e.source) && self.nodes.contains(&e.target));
        if !self.edges.insert(e.clone()) {
            return false;
        }
        self.out.entry((e.source, e.label.clone())).or_default().insert(e.target);
        if let Some(j) = self.journal.last_mut() {
            j.record_add(&e);
        }
        true
    }

    /// Removes an edge; returns false if it was absent.
    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        if !self.edges.remove(e) {
            return false;
        }
        let key = (e.source, e.label.clone());
        if let Some(set) = self.out.get_mut(&key) {
            set.remove(&e.target);
            if set.is_empty() {
                self.out.remove(&key);
            }
        }
        if let Some(j) = self.journal.last_mut() {
            j.record_remove(e);
        }
        true
    }

    /// Opens a new innermost journal.
    pub fn push_journal(&mut self) {
        self.journal.push(Delta::default());
    }

    /// Closes the innermost journal without propagating it outward.
    pub fn pop_journal(&mut self) -> Delta {
        self.journal.pop().expect("journal underflow")
    }

    /// Closes the innermost journal and folds its net effect into the
    /// enclosing one.
    pub fn commit_journal(&mut self) -> Delta {
        let d = self.pop_journal();
        if let Some(parent) = self.journal.last_mut() {
            for e in &d.added {
                parent.record_add(e);
            }
            for e in &d.removed {
                parent.record_remove(e);
            }
        }
        d
    }

    /// Undoes `delta` without recording anything.
    pub fn revert_unlogged(&mut self, delta: &Delta) {
        let saved = std::mem::take(&mut self.journal);
        for e in &delta.added {
            self.remove_edge(e);
        }
        for e in &delta.removed {
            self.add_edge(e.clone());
        }
        self.journal = saved;
    }

    // ---- value sets and aliasing ----

    /// Nodes reachable from any root along the labels of `p`. `Current`
    /// yields the roots; unknown labels yield the empty set.
    pub fn value_set(&self, p: &PathExpr) -> BTreeSet<NodeId> {
        self.value_set_from(self.roots.iter().copied(), p)
    }

    /// Value set of `p` starting from the given nodes instead of the roots.
    pub fn value_set_from<I: IntoIterator<Item = NodeId>>(&self, start: I, p: &PathExpr) -> BTreeSet<NodeId> {
        let mut cur: BTreeSet<NodeId> = start.into_iter().collect();
        for l in p.segments() {
            if cur.is_empty() {
                break;
            }
            cur = cur.iter().flat_map(|&n| self.successors(n, l)).collect();
        }
        cur
    }

    /// Expressions of `universe` that may be aliased to `p`: those whose
    /// value set meets `p`'s within some root component.
    pub fn alias_set(&self, p: &PathExpr, universe: &ExprUniverse) -> BTreeSet<PathExpr> {
        self.alias_set_among(p, universe.iter())
    }

    pub fn alias_set_among<'a, I: IntoIterator<Item = &'a PathExpr>>(&self, p: &PathExpr, candidates: I) -> BTreeSet<PathExpr> {
        let per_root: Vec<(NodeId, BTreeSet<NodeId>)> = self
            .roots
            .iter()
            .map(|&r| (r, self.value_set_from([r], p)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        if per_root.is_empty() {
            return BTreeSet::new();
        }
        candidates
            .into_iter()
            .filter(|q| {
                per_root
                    .iter()
                    .any(|(r, vp)| !self.value_set_from([*r], q).is_disjoint(vp))
            })
            .cloned()
            .collect()
    }

    /// True when `p` and `q` may be aliased in some root component.
    pub fn may_alias(&self, p: &PathExpr, q: &PathExpr) -> bool {
        self.roots.iter().any(|&r| {
            let vp = self.value_set_from([r], p);
            !vp.is_empty() && !self.value_set_from([r], q).is_disjoint(&vp)
        })
    }

    /// Every user-label path of length `1..=max_len` that has a non-empty
    /// value set.
    pub fn diagram_paths(&self, max_len: usize) -> BTreeSet<PathExpr> {
        let mut result = BTreeSet::new();
        let mut frontier: Vec<(PathExpr, BTreeSet<NodeId>)> = vec![(PathExpr::current(), self.roots.clone())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (p, nodes) in &frontier {
                let mut by_label: BTreeMap<Label, BTreeSet<NodeId>> = BTreeMap::new();
                for &n in nodes {
                    for e in self.edges_from(n).filter(|e| e.label.is_user()) {
                        by_label.entry(e.label.clone()).or_default().insert(e.target);
                    }
                }
                for (l, targets) in by_label {
                    let q = p.push(l);
                    result.insert(q.clone());
                    next.push((q, targets));
                }
            }
            frontier = next;
        }
        result
    }

    // ---- linking operations ----

    fn check_nodes<'a, I: IntoIterator<Item = &'a NodeId>>(&self, xs: I) -> Result<(), DiagramError> {
        for &x in xs {
            if !self.nodes.contains(&x) {
                return Err(DiagramError::UnknownNode(x));
            }
        }
        Ok(())
    }

    /// Adds an edge `t` from every root to every member of `targets`.
    pub fn link(&mut self, t: &Label, targets: &BTreeSet<NodeId>) -> Result<(), DiagramError> {
        self.check_nodes(targets)?;
        let roots: Vec<NodeId> = self.roots.iter().copied().collect();
        for r in roots {
            self.link_from(r, t, targets);
        }
        Ok(())
    }

    /// Removes every root out-edge labelled `t`.
    pub fn unlink(&mut self, t: &Label) {
        let roots: Vec<NodeId> = self.roots.iter().copied().collect();
        for r in roots {
            self.unlink_from(r, t);
        }
    }

    pub fn unlink_list(&mut self, labels: &[Label]) {
        for l in labels {
            self.unlink(l);
        }
    }

    pub fn relink(&mut self, t: &Label, targets: &BTreeSet<NodeId>) -> Result<(), DiagramError> {
        self.check_nodes(targets)?;
        self.unlink(t);
        self.link(t, targets)
    }

    /// `G[formals : actuals]`: every value set is evaluated on the incoming
    /// diagram before any edge is added.
    pub fn bulk_link(&mut self, formals: &[Label], actuals: &[PathExpr]) -> Result<(), DiagramError> {
        if formals.len() != actuals.len() {
            return Err(DiagramError::LengthMismatch { formals: formals.len(), actuals: actuals.len() });
        }
        let sets: Vec<BTreeSet<NodeId>> = actuals.iter().map(|a| self.value_set(a)).collect();
        for (f, s) in formals.iter().zip(&sets) {
            self.link(f, s)?;
        }
        Ok(())
    }

    /// Adds `t`-edges from a single source.
    pub fn link_from(&mut self, source: NodeId, t: &Label, targets: &BTreeSet<NodeId>) {
        for &x in targets {
            self.add_edge(Edge::new(t.clone(), source, x));
        }
    }

    /// Removes the `t`-edges of a single source; returns what was removed.
    pub fn unlink_from(&mut self, source: NodeId, t: &Label) -> Vec<Edge> {
        let targets: Vec<NodeId> = self.successors(source, t).collect();
        let mut removed = Vec::with_capacity(targets.len());
        for x in targets {
            let e = Edge::new(t.clone(), source, x);
            self.remove_edge(&e);
            removed.push(e);
        }
        removed
    }

    pub fn relink_from(&mut self, source: NodeId, t: &Label, targets: &BTreeSet<NodeId>) {
        self.unlink_from(source, t);
        self.link_from(source, t, targets);
    }

    /// Replaces the root set.
    pub fn reroot(&mut self, roots: &BTreeSet<NodeId>) -> Result<(), DiagramError> {
        if roots.is_empty() {
            return Err(DiagramError::EmptyRoots);
        }
        self.check_nodes(roots)?;
        self.roots = roots.clone();
        Ok(())
    }

    /// Adds a fresh node with no edges.
    pub fn include(&mut self) -> NodeId {
        let n = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(n);
        n
    }

    /// Componentwise union. Both diagrams must draw ids from the same
    /// counter lineage for shared ids to mean the same object.
    pub fn union(&self, other: &AliasDiagram) -> AliasDiagram {
        let mut g = self.clone();
        g.journal.clear();
        g.nodes.extend(other.nodes.iter().copied());
        g.roots.extend(other.roots.iter().copied());
        g.summaries.extend(other.summaries.iter().copied());
        g.next_id = g.next_id.max(other.next_id);
        for e in &other.edges {
            g.add_edge(e.clone());
        }
        g
    }

    /// Isomorphic copy over fresh ids, together with the old-to-new map.
    pub fn clone_fresh(&self) -> (AliasDiagram, BTreeMap<NodeId, NodeId>) {
        let mut g = AliasDiagram {
            nodes: BTreeSet::new(),
            roots: BTreeSet::new(),
            edges: BTreeSet::new(),
            out: HashMap::new(),
            summaries: BTreeSet::new(),
            next_id: self.next_id,
            journal: Vec::new(),
        };
        let map: BTreeMap<NodeId, NodeId> = self.nodes.iter().map(|&n| (n, g.include())).collect();
        g.roots = self.roots.iter().map(|r| map[r]).collect();
        g.summaries = self.summaries.iter().map(|n| map[n]).collect();
        for e in &self.edges {
            g.add_edge(Edge::new(e.label.clone(), map[&e.source], map[&e.target]));
        }
        (g, map)
    }

    /// Raises the id counter so later ids avoid everything below `floor`.
    pub fn reserve_ids(&mut self, floor: u32) {
        self.next_id = self.next_id.max(floor);
    }

    pub fn id_watermark(&self) -> u32 {
        self.next_id
    }

    /// Adds `k` fresh roots per existing root, without copying any edges.
    /// With several roots each one is cloned and the clones are returned
    /// grouped per copy, in root order.
    pub fn clone_roots(&mut self, k: usize) -> Vec<NodeId> {
        let originals: Vec<NodeId> = self.roots.iter().copied().collect();
        let mut added = Vec::new();
        for _ in 0..k {
            for _ in &originals {
                let n = self.include();
                self.roots.insert(n);
                added.push(n);
            }
        }
        added
    }

    /// Dot distribution `x•G`: adds a back-pointer `x'` from every node of
    /// `V(x)` to every root. Returns the back-pointer label.
    pub fn dot_distribute(&mut self, x: &PathExpr, depth: u32) -> Result<Label, DiagramError> {
        let targets = self.value_set(x);
        if targets.is_empty() {
            return Err(DiagramError::VoidTarget(x.clone()));
        }
        let label = Label::primed(x, depth);
        let roots = self.roots.clone();
        for o in targets {
            self.link_from(o, &label, &roots);
        }
        Ok(label)
    }

    /// Removes every edge carrying `label`, whatever its source.
    pub fn remove_label(&mut self, label: &Label) {
        let doomed: Vec<Edge> = self.edges.iter().filter(|e| &e.label == label).cloned().collect();
        for e in doomed {
            self.remove_edge(&e);
        }
    }

    /// Nodes reachable from the roots along any edges (roots included).
    pub fn reachable(&self) -> BTreeSet<NodeId> {
        let mut seen: BTreeSet<NodeId> = self.roots.clone();
        let mut queue: VecDeque<NodeId> = self.roots.iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            for e in self.edges_from(n) {
                if seen.insert(e.target) {
                    queue.push_back(e.target);
                }
            }
        }
        seen
    }

    /// Copy without any open journals, for frozen snapshots.
    pub fn detached(&self) -> AliasDiagram {
        let mut g = self.clone();
        g.journal.clear();
        g
    }

    /// Hash of the observable state (nodes, roots, edge triples).
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.nodes.hash(&mut h);
        self.roots.hash(&mut h);
        self.edges.hash(&mut h);
        h.finish()
    }

    /// Graph isomorphism of the root-reachable parts, preserving roots and
    /// edge labels.
    pub fn isomorphic(&self, other: &AliasDiagram) -> bool {
        iso::isomorphic(self, other)
    }
}

mod iso {
    use super::*;

    struct View {
        nodes: Vec<NodeId>,
        index: HashMap<NodeId, usize>,
        roots: Vec<bool>,
        out: Vec<BTreeSet<(String, usize)>>,
        sig: Vec<(bool, Vec<String>, Vec<String>)>,
    }

    fn view(g: &AliasDiagram) -> View {
        let nodes: Vec<NodeId> = g.reachable().into_iter().collect();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut out = vec![BTreeSet::new(); nodes.len()];
        let mut ins: Vec<Vec<String>> = vec![Vec::new(); nodes.len()];
        let mut outs: Vec<Vec<String>> = vec![Vec::new(); nodes.len()];
        for (i, &n) in nodes.iter().enumerate() {
            for e in g.edges_from(n) {
                let j = index[&e.target];
                let l = e.label.to_string();
                out[i].insert((l.clone(), j));
                outs[i].push(l.clone());
                ins[j].push(l);
            }
        }
        let roots: Vec<bool> = nodes.iter().map(|n| g.roots.contains(n)).collect();
        let sig = (0..nodes.len())
            .map(|i| {
                let mut o = outs[i].clone();
                o.sort();
                let mut n = ins[i].clone();
                n.sort();
                (roots[i], o, n)
            })
            .collect();
        View { nodes, index, roots, out, sig }
    }

    pub(super) fn isomorphic(a: &AliasDiagram, b: &AliasDiagram) -> bool {
        let va = view(a);
        let vb = view(b);
        if va.nodes.len() != vb.nodes.len() {
            return false;
        }
        let ea: usize = va.out.iter().map(BTreeSet::len).sum();
        let eb: usize = vb.out.iter().map(BTreeSet::len).sum();
        if ea != eb || va.roots.iter().filter(|r| **r).count() != vb.roots.iter().filter(|r| **r).count() {
            return false;
        }
        let mut sa = va.sig.clone();
        let mut sb = vb.sig.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return false;
        }
        let mut map = vec![usize::MAX; va.nodes.len()];
        let mut used = vec![false; vb.nodes.len()];
        let _ = &va.index;
        extend(&va, &vb, 0, &mut map, &mut used)
    }

    fn consistent(va: &View, vb: &View, i: usize, j: usize, map: &[usize]) -> bool {
        // every edge between i and already-mapped nodes must exist in b
        for (l, t) in &va.out[i] {
            let mt = if *t == i { j } else { map[*t] };
            if mt != usize::MAX && !vb.out[j].contains(&(l.clone(), mt)) {
                return false;
            }
        }
        for (k, &mk) in map.iter().enumerate() {
            if mk == usize::MAX || k == i {
                continue;
            }
            for (l, t) in &va.out[k] {
                if *t == i && !vb.out[mk].contains(&(l.clone(), j)) {
                    return false;
                }
            }
        }
        true
    }

    fn extend(va: &View, vb: &View, i: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if i == va.nodes.len() {
            return true;
        }
        for j in 0..vb.nodes.len() {
            if used[j] || va.sig[i] != vb.sig[j] || !consistent(va, vb, i, j, map) {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if extend(va, vb, i + 1, map, used) {
                return true;
            }
            map[i] = usize::MAX;
            used[j] = false;
        }
        false
    }
}
