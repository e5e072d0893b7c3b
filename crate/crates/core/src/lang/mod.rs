//! Source language: lexer, parser, name resolution and the class table.
//!
//! Programs are a list of classes with attributes and routines. `if`
//! chains are desugared at parse time into a choice of guarded branches;
//! a right-hand path whose last segment names a function is rewritten into
//! a call during resolution.

mod ast;
mod lexer;
mod parser;
mod printer;
mod resolve;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{ExprUniverse, PathExpr};

pub use ast::*;
pub use printer::print_program;

/// Class every program implicitly contains; useful as an opaque type.
pub const ANY: &str = "ANY";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unknown type `{name}`")]
    UnknownType { span: Span, name: String },
    #[error("{span}: duplicate declaration of `{name}`")]
    Duplicate { span: Span, name: String },
    #[error("{span}: cyclic inheritance involving `{class}`")]
    CyclicInheritance { span: Span, class: String },
    #[error("{span}: {message}")]
    Resolution { span: Span, message: String },
    #[error("{span}: cannot assign to formal argument `{name}`")]
    AssignToFormal { span: Span, name: String },
    #[error("1:1: program declares no classes")]
    EmptyProgram,
}

impl LangError {
    /// `file:line:col: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, line: span.line, col: span.col, message: message.into() }
    }

    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, line: span.line, col: span.col, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.col, self.message)
    }
}

/// One candidate of a dynamically dispatched call.
#[derive(Debug, Clone, Copy)]
pub struct DispatchTarget<'a> {
    /// Dynamic class the branch runs in.
    pub class: &'a str,
    /// Class whose text declares the routine version.
    pub declared_in: &'a str,
    pub routine: &'a RoutineDecl,
}

/// A parsed and resolved program.
#[derive(Debug, Clone)]
pub struct Program {
    classes: BTreeMap<String, ClassDecl>,
    /// Declaration order, for stable output.
    order: Vec<String>,
    children: BTreeMap<String, Vec<String>>,
    pub warnings: Vec<Diagnostic>,
}

impl Program {
    pub fn parse(src: &str) -> Result<Program, LangError> {
        let parsed = parser::parse(src)?;
        if parsed.classes.is_empty() {
            return Err(LangError::EmptyProgram);
        }
        let mut program = resolve::build(parsed.classes)?;
        program.warnings.splice(0..0, parsed.warnings);
        Ok(program)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name)
    }

    /// User-declared classes in source order (the implicit `ANY` excluded
    /// unless declared).
    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.order.iter().filter_map(|n| self.classes.get(n))
    }

    /// `name` followed by its ancestors, nearest first.
    pub fn ancestors<'a>(&'a self, name: &'a str) -> Vec<&'a str> {
        let mut v = Vec::new();
        let mut cur = Some(name);
        while let Some(c) = cur {
            if v.contains(&c) {
                break;
            }
            v.push(c);
            cur = self.classes.get(c).and_then(|d| d.parent.as_deref());
        }
        v
    }

    pub fn attribute_type(&self, class: &str, attr: &str) -> Option<&str> {
        self.ancestors(class)
            .into_iter()
            .find_map(|c| self.classes.get(c)?.attribute(attr))
            .map(|d| d.ty.as_str())
    }

    /// Version of `name` visible in `class`, with the class declaring it.
    pub fn find_routine<'a>(&'a self, class: &'a str, name: &str) -> Option<(&'a str, &'a RoutineDecl)> {
        self.ancestors(class).into_iter().find_map(|c| {
            let d = self.classes.get(c)?;
            d.routine(name).map(|r| (d.name.as_str(), r))
        })
    }

    /// Resolves `Class.routine` or a bare routine name declared by exactly
    /// one class.
    pub fn entry(&self, spec: &str) -> Result<DispatchTarget<'_>, LangError> {
        let none = Span { line: 1, col: 1 };
        if let Some((c, r)) = spec.split_once('.') {
            let class = self.classes.get_key_value(c).map(|(k, _)| k.as_str()).ok_or_else(|| {
                LangError::Resolution { span: none, message: format!("unknown entry class `{c}`") }
            })?;
            let (declared_in, routine) = self.find_routine(class, r).ok_or_else(|| LangError::Resolution {
                span: none,
                message: format!("class `{c}` has no routine `{r}`"),
            })?;
            return Ok(DispatchTarget { class, declared_in, routine });
        }
        let hits: Vec<_> = self.classes().filter_map(|c| c.routine(spec).map(|r| (c.name.as_str(), r))).collect();
        match hits.as_slice() {
            [(c, r)] => Ok(DispatchTarget { class: c, declared_in: c, routine: r }),
            [] => Err(LangError::Resolution { span: none, message: format!("no routine named `{spec}`") }),
            _ => Err(LangError::Resolution {
                span: none,
                message: format!("routine `{spec}` is ambiguous; use Class.{spec}"),
            }),
        }
    }

    /// Static type of `path` evaluated inside `routine` of `class`.
    pub fn type_of(&self, class: &str, routine: &RoutineDecl, path: &PathExpr) -> Option<String> {
        let mut ty = class.to_string();
        for (i, seg) in path.segments().iter().enumerate() {
            let name = seg.name();
            let next = if i == 0 { routine.local_type(name) } else { None };
            ty = match next {
                Some(t) => t.to_string(),
                None => self.attribute_type(&ty, name)?.to_string(),
            };
        }
        Some(ty)
    }

    /// Versions of `routine` a call on a `static_type` target may reach: the
    /// static type's own version first, then every descendant that
    /// redeclares it, shallower classes first and ties broken by name.
    pub fn heirs_redefining<'a>(&'a self, static_type: &'a str, routine: &str) -> Vec<DispatchTarget<'a>> {
        let mut out = Vec::new();
        let Some((declared_in, r)) = self.find_routine(static_type, routine) else {
            return out;
        };
        out.push(DispatchTarget { class: static_type, declared_in, routine: r });
        let mut queue: VecDeque<&str> = VecDeque::from([static_type]);
        let mut seen = BTreeSet::from([static_type]);
        while let Some(c) = queue.pop_front() {
            for child in self.children.get(c).into_iter().flatten() {
                if !seen.insert(child.as_str()) {
                    continue;
                }
                if let Some(r) = self.classes[child].routine(routine) {
                    out.push(DispatchTarget { class: child, declared_in: child, routine: r });
                }
                queue.push_back(child);
            }
        }
        out
    }

    /// Every path expression the program text mentions, prefix-closed.
    pub fn universe(&self) -> ExprUniverse {
        let mut u = ExprUniverse::new();
        for c in self.classes() {
            for r in &c.routines {
                r.body.walk(&mut |i| {
                    for p in instr_paths(i) {
                        u.insert(&p);
                    }
                });
            }
        }
        u
    }
}

fn instr_paths(i: &Instr) -> Vec<PathExpr> {
    let call_paths = |c: &Call| {
        let mut v = c.actuals.clone();
        v.extend(c.target.clone());
        v
    };
    match &i.kind {
        InstrKind::Assign { target, source } => {
            let mut v = vec![target.clone()];
            match source {
                Source::Path(p) => v.push(p.clone()),
                Source::Call(c) => v.extend(call_paths(c)),
                Source::Void => {}
            }
            v
        }
        InstrKind::Create { target } => vec![PathExpr::single(target.clone())],
        InstrKind::Guard { cond, .. } => cond.paths().into_iter().cloned().collect(),
        InstrKind::Call(c) => call_paths(c),
        _ => Vec::new(),
    }
}
