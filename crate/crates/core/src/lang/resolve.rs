use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::PathExpr;

use super::*;

pub(super) fn build(decls: Vec<ClassDecl>) -> Result<Program, LangError> {
    let mut classes = BTreeMap::new();
    let mut order = Vec::new();
    for c in decls {
        if classes.contains_key(&c.name) {
            return Err(LangError::Duplicate { span: c.span, name: c.name });
        }
        order.push(c.name.clone());
        classes.insert(c.name.clone(), c);
    }
    classes.entry(ANY.to_string()).or_insert_with(|| ClassDecl {
        name: ANY.to_string(),
        parent: None,
        redefines: Vec::new(),
        attributes: Vec::new(),
        routines: Vec::new(),
        span: Span::default(),
    });
    let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in classes.values() {
        if let Some(p) = &c.parent {
            if !classes.contains_key(p) {
                return Err(LangError::UnknownType { span: c.span, name: p.clone() });
            }
            children.entry(p.clone()).or_default().push(c.name.clone());
        }
    }
    let mut program = Program { classes, order, children, warnings: Vec::new() };
    check_acyclic(&program)?;
    for name in program.order.clone() {
        check_class(&program, &name)?;
    }
    let mut rewritten = Vec::new();
    for name in &program.order {
        let c = &program.classes[name];
        for (idx, r) in c.routines.iter().enumerate() {
            let mut body = r.body.clone();
            let mut cx = Cx { program: &program, class: name, routine: r };
            cx.instr(&mut body)?;
            rewritten.push((name.clone(), idx, body));
        }
    }
    for (name, idx, body) in rewritten {
        program.classes.get_mut(&name).expect("known").routines[idx].body = body;
    }
    number_points(&mut program);
    Ok(program)
}

fn check_acyclic(p: &Program) -> Result<(), LangError> {
    for c in p.classes.values() {
        let mut seen = BTreeSet::new();
        let mut cur = Some(c.name.as_str());
        while let Some(n) = cur {
            if !seen.insert(n) {
                return Err(LangError::CyclicInheritance { span: c.span, class: c.name.clone() });
            }
            cur = p.classes[n].parent.as_deref();
        }
    }
    Ok(())
}

fn check_type(p: &Program, span: Span, ty: &str) -> Result<(), LangError> {
    if p.classes.contains_key(ty) {
        Ok(())
    } else {
        Err(LangError::UnknownType { span, name: ty.to_string() })
    }
}

fn check_class(p: &Program, name: &str) -> Result<(), LangError> {
    let c = &p.classes[name];
    let parent = c.parent.as_deref();
    let mut own = BTreeSet::new();
    for a in &c.attributes {
        check_type(p, c.span, &a.ty)?;
        let inherited = parent.is_some_and(|q| p.attribute_type(q, &a.name).is_some() || p.find_routine(q, &a.name).is_some());
        if !own.insert(a.name.as_str()) || inherited || a.name == "Result" {
            return Err(LangError::Duplicate { span: c.span, name: a.name.clone() });
        }
    }
    for r in &c.routines {
        if !own.insert(r.name.as_str()) {
            return Err(LangError::Duplicate { span: r.span, name: r.name.clone() });
        }
        let inherited = parent.is_some_and(|q| p.find_routine(q, &r.name).is_some());
        let redefined = c.redefines.contains(&r.name);
        if inherited && !redefined {
            return Err(LangError::Duplicate { span: r.span, name: r.name.clone() });
        }
        if parent.is_some_and(|q| p.attribute_type(q, &r.name).is_some()) {
            return Err(LangError::Duplicate { span: r.span, name: r.name.clone() });
        }
        check_routine(p, name, r)?;
    }
    for f in &c.redefines {
        let inherited = parent.is_some_and(|q| p.find_routine(q, f).is_some());
        if !inherited || c.routine(f).is_none() {
            return Err(LangError::Resolution {
                span: c.span,
                message: format!("`{f}` is redefined but not an inherited routine redeclared here"),
            });
        }
    }
    Ok(())
}

fn check_routine(p: &Program, class: &str, r: &RoutineDecl) -> Result<(), LangError> {
    let mut names = BTreeSet::new();
    for d in r.formals.iter().chain(&r.locals) {
        check_type(p, r.span, &d.ty)?;
        let clash = p.attribute_type(class, &d.name).is_some() || d.name == "Result";
        if !names.insert(d.name.as_str()) || clash {
            return Err(LangError::Duplicate { span: r.span, name: d.name.clone() });
        }
    }
    if let Some(t) = &r.result {
        check_type(p, r.span, t)?;
    }
    Ok(())
}

/// Resolution context for one routine body.
struct Cx<'a> {
    program: &'a Program,
    class: &'a str,
    routine: &'a RoutineDecl,
}

impl Cx<'_> {
    fn err<T>(&self, span: Span, message: String) -> Result<T, LangError> {
        Err(LangError::Resolution { span, message })
    }

    fn type_of(&self, span: Span, path: &PathExpr) -> Result<String, LangError> {
        if let Some(ty) = self.program.type_of(self.class, self.routine, path) {
            return Ok(ty);
        }
        // Find the first failing prefix for the message.
        let bad = path
            .prefixes()
            .find(|q| self.program.type_of(self.class, self.routine, q).is_none())
            .unwrap_or_else(|| path.clone());
        let seg = bad.last().map(|l| l.name().to_string()).unwrap_or_default();
        if seg == "Result" && !self.routine.is_function() {
            return self.err(span, format!("`Result` used in procedure `{}`", self.routine.name));
        }
        match bad.parent().filter(|q| !q.is_current()) {
            Some(q) => {
                let owner = self.program.type_of(self.class, self.routine, &q).unwrap_or_default();
                self.err(span, format!("`{seg}` is not an attribute of `{owner}` (in `{path}`)"))
            }
            None => self.err(span, format!("unknown name `{seg}` in `{}.{}`", self.class, self.routine.name)),
        }
    }

    fn check_target(&self, span: Span, target: &PathExpr) -> Result<(), LangError> {
        if target.len() == 1 {
            let name = target.first().expect("non-empty").name();
            if self.routine.is_formal(name) {
                return Err(LangError::AssignToFormal { span, name: name.to_string() });
            }
        }
        self.type_of(span, target).map(|_| ())
    }

    fn call(&self, span: Span, call: &Call, need_result: bool) -> Result<(), LangError> {
        let owner = match &call.target {
            Some(t) => self.type_of(span, t)?,
            None => self.class.to_string(),
        };
        let Some((_, r)) = self.program.find_routine(&owner, &call.routine) else {
            return self.err(span, format!("`{}` is not a routine of `{owner}`", call.routine));
        };
        if need_result && !r.is_function() {
            return self.err(span, format!("procedure `{}` used as a value", call.routine));
        }
        if r.formals.len() != call.actuals.len() {
            return self.err(
                span,
                format!("`{}` expects {} argument(s), got {}", call.routine, r.formals.len(), call.actuals.len()),
            );
        }
        for a in &call.actuals {
            self.type_of(span, a)?;
        }
        Ok(())
    }

    /// `p.f` on a right-hand side where `f` is a function rather than an
    /// attribute.
    fn as_call(&self, path: &PathExpr) -> Option<Call> {
        let last = path.last()?.name();
        let parent = path.parent().expect("non-empty");
        let owner = if parent.is_current() {
            if self.routine.local_type(last).is_some() {
                return None;
            }
            self.class.to_string()
        } else {
            self.program.type_of(self.class, self.routine, &parent)?
        };
        if self.program.attribute_type(&owner, last).is_some() {
            return None;
        }
        self.program.find_routine(&owner, last)?;
        Some(Call { target: Some(parent).filter(|p| !p.is_current()), routine: last.to_string(), actuals: Vec::new() })
    }

    fn instr(&mut self, i: &mut Instr) -> Result<(), LangError> {
        let span = i.span;
        match &mut i.kind {
            InstrKind::Assign { target, source } => {
                self.check_target(span, target)?;
                if let Source::Path(p) = source {
                    if p.is_current() {
                        return Ok(());
                    }
                    if let Some(c) = self.as_call(p) {
                        *source = Source::Call(c);
                    }
                }
                match source {
                    Source::Path(p) => self.type_of(span, p).map(|_| ()),
                    Source::Call(c) => self.call(span, c, true),
                    Source::Void => Ok(()),
                }
            }
            InstrKind::Create { target } => self.check_target(span, &PathExpr::single(target.clone())),
            InstrKind::Compound(v) | InstrKind::Choice(v) => v.iter_mut().try_for_each(|i| self.instr(i)),
            InstrKind::Guard { cond, body } => {
                for p in cond.paths() {
                    if !p.is_current() {
                        self.type_of(span, p)?;
                    }
                }
                self.instr(body)
            }
            InstrKind::Loop { body } => self.instr(body),
            InstrKind::Call(c) => self.call(span, c, false),
        }
    }
}

fn number_points(p: &mut Program) {
    let mut next = 0u32;
    for name in p.order.clone() {
        let c = p.classes.get_mut(&name).expect("known");
        for r in &mut c.routines {
            r.body.walk_mut(&mut |i| {
                i.point.id = next;
                next += 1;
            });
        }
    }
}
