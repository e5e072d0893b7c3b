use std::fmt;

use crate::diagram::{Label, PathExpr};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Identity of one instruction: a unique number plus the optional source
/// label (`L2:`) the program attached to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ProgramPoint {
    pub id: u32,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Eq(PathExpr, PathExpr),
    Neq(PathExpr, PathExpr),
    EqVoid(PathExpr),
    NeqVoid(PathExpr),
    Not(Box<Cond>),
}

impl Cond {
    pub fn negate(self) -> Cond {
        Cond::Not(Box::new(self))
    }

    pub fn paths(&self) -> Vec<&PathExpr> {
        match self {
            Cond::Eq(a, b) | Cond::Neq(a, b) => vec![a, b],
            Cond::EqVoid(a) | Cond::NeqVoid(a) => vec![a],
            Cond::Not(c) => c.paths(),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Eq(a, b) => write!(f, "{a} = {b}"),
            Cond::Neq(a, b) => write!(f, "{a} /= {b}"),
            Cond::EqVoid(a) => write!(f, "{a} = Void"),
            Cond::NeqVoid(a) => write!(f, "{a} /= Void"),
            Cond::Not(c) => write!(f, "not ({c})"),
        }
    }
}

/// A routine call; `target` is `None` for unqualified calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call {
    pub target: Option<PathExpr>,
    pub routine: String,
    pub actuals: Vec<PathExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Path(PathExpr),
    Void,
    Call(Call),
}

#[derive(Debug, Clone)]
pub enum InstrKind {
    Assign { target: PathExpr, source: Source },
    Create { target: Label },
    Compound(Vec<Instr>),
    /// Non-deterministic choice; at least two branches.
    Choice(Vec<Instr>),
    /// `if c: body` — skip when `c` is known not to hold.
    Guard { cond: Cond, body: Box<Instr> },
    Loop { body: Box<Instr> },
    Call(Call),
}

#[derive(Debug, Clone)]
pub struct Instr {
    pub point: ProgramPoint,
    pub span: Span,
    pub kind: InstrKind,
}

/// Structural equality: ignores spans and point numbering but not labels.
impl PartialEq for Instr {
    fn eq(&self, other: &Self) -> bool {
        if self.point.label != other.point.label {
            return false;
        }
        use InstrKind::*;
        match (&self.kind, &other.kind) {
            (Assign { target: a, source: b }, Assign { target: c, source: d }) => a == c && b == d,
            (Create { target: a }, Create { target: b }) => a == b,
            (Compound(a), Compound(b)) | (Choice(a), Choice(b)) => a == b,
            (Guard { cond: a, body: b }, Guard { cond: c, body: d }) => a == c && b == d,
            (Loop { body: a }, Loop { body: b }) => a == b,
            (Call(a), Call(b)) => a == b,
            _ => false,
        }
    }
}

impl Instr {
    pub fn new(kind: InstrKind) -> Self {
        Instr { point: ProgramPoint::default(), span: Span::default(), kind }
    }

    pub fn skip() -> Self {
        Instr::new(InstrKind::Compound(Vec::new()))
    }

    pub fn is_skip(&self) -> bool {
        matches!(&self.kind, InstrKind::Compound(v) if v.is_empty())
    }

    /// Pre-order walk over this instruction and all nested ones.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Instr)) {
        f(self);
        match &self.kind {
            InstrKind::Compound(v) | InstrKind::Choice(v) => v.iter().for_each(|i| i.walk(f)),
            InstrKind::Guard { body, .. } | InstrKind::Loop { body } => body.walk(f),
            _ => {}
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Instr)) {
        f(self);
        match &mut self.kind {
            InstrKind::Compound(v) | InstrKind::Choice(v) => v.iter_mut().for_each(|i| i.walk_mut(f)),
            InstrKind::Guard { body, .. } | InstrKind::Loop { body } => body.walk_mut(f),
            _ => {}
        }
    }

    /// Number of instructions in this tree, compounds excluded.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |i| {
            if !matches!(i.kind, InstrKind::Compound(_)) {
                n += 1;
            }
        });
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub ty: String,
}

impl Decl {
    pub fn new(name: &str, ty: &str) -> Self {
        Decl { name: name.to_string(), ty: ty.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct RoutineDecl {
    pub name: String,
    pub formals: Vec<Decl>,
    pub locals: Vec<Decl>,
    /// Result type for functions.
    pub result: Option<String>,
    pub body: Instr,
    pub span: Span,
}

impl RoutineDecl {
    pub fn is_function(&self) -> bool {
        self.result.is_some()
    }

    /// Labels that live in an activation of this routine: formals, locals
    /// and `Result`.
    pub fn scope_labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.formals.iter().chain(&self.locals).map(|d| Label::user(&d.name)).collect();
        if self.result.is_some() {
            v.push(Label::user("Result"));
        }
        v
    }

    pub fn local_type(&self, name: &str) -> Option<&str> {
        if name == "Result" {
            return self.result.as_deref();
        }
        self.formals
            .iter()
            .chain(&self.locals)
            .find(|d| d.name == name)
            .map(|d| d.ty.as_str())
    }

    pub fn is_formal(&self, name: &str) -> bool {
        self.formals.iter().any(|d| d.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct ClassDecl {
    pub name: String,
    pub parent: Option<String>,
    pub redefines: Vec<String>,
    pub attributes: Vec<Decl>,
    pub routines: Vec<RoutineDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn routine(&self, name: &str) -> Option<&RoutineDecl> {
        self.routines.iter().find(|r| r.name == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&Decl> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

// Declarations compare structurally, ignoring source positions.
impl PartialEq for RoutineDecl {
    fn eq(&self, o: &Self) -> bool {
        (&self.name, &self.formals, &self.locals, &self.result, &self.body)
            == (&o.name, &o.formals, &o.locals, &o.result, &o.body)
    }
}

impl PartialEq for ClassDecl {
    fn eq(&self, o: &Self) -> bool {
        (&self.name, &self.parent, &self.redefines, &self.attributes, &self.routines)
            == (&o.name, &o.parent, &o.redefines, &o.attributes, &o.routines)
    }
}
