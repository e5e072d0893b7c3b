use crate::diagram::{Label, PathExpr};

use super::ast::*;
use super::lexer::{tokenize, Tok};
use super::{Diagnostic, LangError};

pub struct Parsed {
    pub classes: Vec<ClassDecl>,
    pub warnings: Vec<Diagnostic>,
}

pub fn parse(src: &str) -> Result<Parsed, LangError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, warnings: Vec::new() };
    let mut classes = Vec::new();
    while !p.at(&Tok::Eof) {
        classes.push(p.class()?);
    }
    Ok(Parsed { classes, warnings: p.warnings })
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    warnings: Vec<Diagnostic>,
}

const BLOCK_END: &[&str] = &["end", "else", "elseif"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(w) if *w == k)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, LangError> {
        Err(LangError::Syntax { span: self.span(), message: format!("expected {expected}, found {}", self.peek()) })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.at_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), LangError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(&t.to_string())
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), LangError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("identifier"),
        }
    }

    fn class(&mut self) -> Result<ClassDecl, LangError> {
        let span = self.span();
        self.expect_kw("class")?;
        let name = self.ident()?;
        let mut parent = None;
        let mut redefines = Vec::new();
        if self.eat_kw("inherit") {
            parent = Some(self.ident()?);
            if self.eat_kw("redefine") {
                redefines = self.ident_list()?;
                self.expect_kw("end")?;
            }
        }
        let mut attributes = Vec::new();
        let mut routines = Vec::new();
        while self.eat_kw("feature") {
            while matches!(self.peek(), Tok::Ident(_)) {
                self.feature(&mut attributes, &mut routines)?;
                self.eat(&Tok::Semi);
            }
        }
        self.expect_kw("end")?;
        Ok(ClassDecl { name, parent, redefines, attributes, routines, span })
    }

    fn ident_list(&mut self) -> Result<Vec<String>, LangError> {
        let mut v = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn decl_group(&mut self) -> Result<Vec<Decl>, LangError> {
        let names = self.ident_list()?;
        self.expect(Tok::Colon)?;
        let ty = self.ident()?;
        Ok(names.iter().map(|n| Decl::new(n, &ty)).collect())
    }

    fn feature(&mut self, attrs: &mut Vec<Decl>, routines: &mut Vec<RoutineDecl>) -> Result<(), LangError> {
        let span = self.span();
        if matches!(self.peek_at(1), Tok::Comma) {
            attrs.extend(self.decl_group()?);
            return Ok(());
        }
        let name = self.ident()?;
        let mut formals = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                formals.extend(self.decl_group()?);
                while self.eat(&Tok::Semi) {
                    formals.extend(self.decl_group()?);
                }
            }
            self.expect(Tok::RParen)?;
        }
        let mut result = None;
        if self.eat(&Tok::Colon) {
            let ty = self.ident()?;
            if formals.is_empty() && !self.at_kw("local") && !self.at_kw("do") && !self.at(&Tok::LParen) {
                attrs.push(Decl::new(&name, &ty));
                return Ok(());
            }
            result = Some(ty);
        }
        let mut locals = Vec::new();
        if self.eat_kw("local") {
            while matches!(self.peek(), Tok::Ident(_)) {
                locals.extend(self.decl_group()?);
                self.eat(&Tok::Semi);
            }
        }
        self.expect_kw("do")?;
        let body = self.block()?;
        self.expect_kw("end")?;
        routines.push(RoutineDecl { name, formals, locals, result, body, span });
        Ok(())
    }

    fn block(&mut self) -> Result<Instr, LangError> {
        let span = self.span();
        let mut v = Vec::new();
        while !BLOCK_END.iter().any(|k| self.at_kw(k)) && !self.at(&Tok::Eof) {
            push_flat(&mut v, self.instr()?);
            while self.eat(&Tok::Semi) {}
        }
        Ok(Instr { span, ..Instr::new(InstrKind::Compound(v)) })
    }

    /// Choice branch; a single instruction stands for itself.
    fn branch(&mut self) -> Result<Instr, LangError> {
        let b = self.block()?;
        match b.kind {
            InstrKind::Compound(mut v) if v.len() == 1 => Ok(v.pop().expect("one")),
            kind => Ok(Instr { kind, ..b }),
        }
    }

    fn instr(&mut self) -> Result<Instr, LangError> {
        let label = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Ident(l), Tok::Colon) => {
                self.bump();
                self.bump();
                Some(l)
            }
            _ => None,
        };
        let span = self.span();
        if self.at_kw("from") || self.at_kw("until") || self.at_kw("loop") {
            let (init, body) = self.looping()?;
            let lp = Instr { point: ProgramPoint { id: 0, label }, span, kind: InstrKind::Loop { body: Box::new(body) } };
            return Ok(match init {
                Some(init) => {
                    let mut v = Vec::new();
                    push_flat(&mut v, init);
                    v.push(lp);
                    Instr { span, ..Instr::new(InstrKind::Compound(v)) }
                }
                None => lp,
            });
        }
        let kind = self.instr_kind()?;
        Ok(Instr { point: ProgramPoint { id: 0, label }, span, kind })
    }

    fn instr_kind(&mut self) -> Result<InstrKind, LangError> {
        if self.eat_kw("create") {
            return match self.peek().clone() {
                Tok::Ident(s) => {
                    self.bump();
                    Ok(InstrKind::Create { target: Label::user(&s) })
                }
                Tok::Kw("Result") => {
                    self.bump();
                    Ok(InstrKind::Create { target: Label::user("Result") })
                }
                _ => self.err("creation target"),
            };
        }
        if self.eat_kw("if") {
            return self.conditional();
        }
        if self.eat_kw("then") {
            let mut branches = vec![self.branch()?];
            while self.eat_kw("elseif") {
                branches.push(self.branch()?);
            }
            if self.eat_kw("else") {
                branches.push(self.branch()?);
            }
            self.expect_kw("end")?;
            if branches.len() < 2 {
                return self.err("`elseif` or `else` in a choice");
            }
            return Ok(InstrKind::Choice(branches));
        }
        let start = self.span();
        let path = self.path()?;
        if self.eat(&Tok::Assign) {
            if path.is_current() {
                return Err(LangError::Syntax { span: start, message: "cannot assign to `Current`".into() });
            }
            let source = self.source()?;
            return Ok(InstrKind::Assign { target: path, source });
        }
        let actuals = self.actuals()?;
        Ok(InstrKind::Call(split_call(path, actuals, start)?))
    }

    fn conditional(&mut self) -> Result<InstrKind, LangError> {
        let cond = self.cond()?;
        if self.eat(&Tok::Colon) {
            let body = self.block()?;
            self.expect_kw("end")?;
            return Ok(InstrKind::Guard { cond, body: Box::new(body) });
        }
        self.expect_kw("then")?;
        let mut arms = vec![(cond, self.block()?)];
        while self.eat_kw("elseif") {
            let c = self.cond()?;
            self.expect_kw("then")?;
            arms.push((c, self.block()?));
        }
        let last = arms.last().map(|(c, _)| c.clone()).expect("non-empty");
        let otherwise = if self.eat_kw("else") { self.block()? } else { Instr::skip() };
        self.expect_kw("end")?;
        let mut branches: Vec<Instr> = arms
            .into_iter()
            .map(|(c, b)| Instr::new(InstrKind::Guard { cond: c, body: Box::new(b) }))
            .collect();
        branches.push(Instr::new(InstrKind::Guard { cond: last.negate(), body: Box::new(otherwise) }));
        Ok(InstrKind::Choice(branches))
    }

    fn looping(&mut self) -> Result<(Option<Instr>, Instr), LangError> {
        let init = if self.eat_kw("from") { Some(self.block_until_loop()?) } else { None };
        if self.at_kw("until") {
            let span = self.span();
            self.bump();
            self.cond()?;
            self.warnings.push(Diagnostic::warning(span, "loop exit condition is ignored by the analysis"));
        }
        self.expect_kw("loop")?;
        let body = self.block()?;
        self.expect_kw("end")?;
        Ok((init, body))
    }

    fn block_until_loop(&mut self) -> Result<Instr, LangError> {
        let span = self.span();
        let mut v = Vec::new();
        while !self.at_kw("until") && !self.at_kw("loop") && !self.at(&Tok::Eof) {
            push_flat(&mut v, self.instr()?);
            while self.eat(&Tok::Semi) {}
        }
        Ok(Instr { span, ..Instr::new(InstrKind::Compound(v)) })
    }

    fn segment(&mut self) -> Result<Label, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Label::user(&s))
            }
            Tok::Kw("Result") => {
                self.bump();
                Ok(Label::user("Result"))
            }
            _ => self.err("identifier"),
        }
    }

    fn path(&mut self) -> Result<PathExpr, LangError> {
        let mut segs = Vec::new();
        if self.eat_kw("Current") && !self.eat(&Tok::Dot) {
            return Ok(PathExpr::current());
        }
        segs.push(self.segment()?);
        while self.eat(&Tok::Dot) {
            segs.push(self.segment()?);
        }
        Ok(PathExpr::new(segs))
    }

    fn actuals(&mut self) -> Result<Vec<PathExpr>, LangError> {
        let mut v = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                v.push(self.path()?);
                while self.eat(&Tok::Comma) {
                    v.push(self.path()?);
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(v)
    }

    fn source(&mut self) -> Result<Source, LangError> {
        if self.eat_kw("Void") {
            return Ok(Source::Void);
        }
        let start = self.span();
        let path = self.path()?;
        if self.at(&Tok::LParen) {
            let actuals = self.actuals()?;
            return Ok(Source::Call(split_call(path, actuals, start)?));
        }
        Ok(Source::Path(path))
    }

    fn cond(&mut self) -> Result<Cond, LangError> {
        if self.eat_kw("not") {
            return Ok(self.cond()?.negate());
        }
        if self.eat(&Tok::LParen) {
            let c = self.cond()?;
            self.expect(Tok::RParen)?;
            return Ok(c);
        }
        let lhs = self.path()?;
        let eq = if self.eat(&Tok::Eq) {
            true
        } else if self.eat(&Tok::Neq) {
            false
        } else {
            return self.err("`=` or `/=`");
        };
        if self.eat_kw("Void") {
            return Ok(if eq { Cond::EqVoid(lhs) } else { Cond::NeqVoid(lhs) });
        }
        let rhs = self.path()?;
        Ok(if eq { Cond::Eq(lhs, rhs) } else { Cond::Neq(lhs, rhs) })
    }
}

fn split_call(path: PathExpr, actuals: Vec<PathExpr>, span: Span) -> Result<Call, LangError> {
    let Some(last) = path.last() else {
        return Err(LangError::Syntax { span, message: "`Current` is not a routine".into() });
    };
    let routine = last.name().to_string();
    let target = path.parent().filter(|p| !p.is_current());
    Ok(Call { target, routine, actuals })
}

/// Unlabeled nested compounds are spliced into the enclosing sequence.
fn push_flat(v: &mut Vec<Instr>, i: Instr) {
    match i.kind {
        InstrKind::Compound(inner) if i.point.label.is_none() => inner.into_iter().for_each(|j| push_flat(v, j)),
        kind => v.push(Instr { kind, ..i }),
    }
}
