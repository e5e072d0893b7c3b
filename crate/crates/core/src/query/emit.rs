use std::fmt::Write;

use crate::diagram::AliasDiagram;

use super::AnalysisReport;

/// Pretty JSON with keys sorted at every level (going through
/// `serde_json::Value`, whose maps are ordered).
pub fn emit_json(report: &AnalysisReport) -> Vec<u8> {
    let value = serde_json::to_value(report).expect("report is serialisable");
    let mut out = serde_json::to_vec_pretty(&value).expect("value is serialisable");
    out.push(b'\n');
    out
}

pub fn parse_json(bytes: &[u8]) -> Result<AnalysisReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}

/// Graphviz rendering: roots double-circled, summary nodes dashed,
/// back-pointer and fresh-site edges dashed.
pub fn emit_dot(g: &AliasDiagram) -> String {
    let mut s = String::from("digraph alias {\n  node [shape=circle];\n");
    for &n in g.nodes() {
        let mut attrs = vec![format!("label=\"n{}\"", n.0)];
        if g.roots().contains(&n) {
            attrs.push("shape=doublecircle".into());
        }
        if g.is_summary(n) {
            attrs.push("style=dashed".into());
        }
        let _ = writeln!(s, "  n{} [{}];", n.0, attrs.join(", "));
    }
    for e in g.edges() {
        let style = if e.label.is_user() { "" } else { ", style=dashed" };
        let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"{}];", e.source.0, e.target.0, e.label, style);
    }
    s.push_str("}\n");
    s
}
