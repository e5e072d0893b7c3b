use std::fmt::Write;

use super::ast::*;
use super::Program;

/// Renders a program back to concrete syntax. Desugared forms print in
/// their core shape (`then … else … end` for choices, `if c: … end` for
/// guards), which parses back to the same tree.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for c in p.classes() {
        print_class(&mut out, c);
        out.push('\n');
    }
    out
}

fn print_class(out: &mut String, c: &ClassDecl) {
    let _ = write!(out, "class {}", c.name);
    if let Some(parent) = &c.parent {
        let _ = write!(out, " inherit {parent}");
        if !c.redefines.is_empty() {
            let _ = write!(out, " redefine {} end", c.redefines.join(", "));
        }
    }
    out.push('\n');
    if !c.attributes.is_empty() || !c.routines.is_empty() {
        out.push_str("feature\n");
    }
    for a in &c.attributes {
        let _ = writeln!(out, "  {}: {}", a.name, a.ty);
    }
    for r in &c.routines {
        print_routine(out, r);
    }
    out.push_str("end\n");
}

fn decls(v: &[Decl]) -> String {
    v.iter().map(|d| format!("{}: {}", d.name, d.ty)).collect::<Vec<_>>().join("; ")
}

fn print_routine(out: &mut String, r: &RoutineDecl) {
    let _ = write!(out, "  {}", r.name);
    if !r.formals.is_empty() {
        let _ = write!(out, " ({})", decls(&r.formals));
    }
    if let Some(t) = &r.result {
        let _ = write!(out, ": {t}");
    }
    out.push('\n');
    if !r.locals.is_empty() {
        let _ = writeln!(out, "    local {}", decls(&r.locals));
    }
    out.push_str("    do\n");
    print_block(out, &r.body, 3);
    out.push_str("    end\n");
}

fn print_block(out: &mut String, i: &Instr, depth: usize) {
    match &i.kind {
        InstrKind::Compound(v) if i.point.label.is_none() => v.iter().for_each(|j| print_instr(out, j, depth)),
        _ => print_instr(out, i, depth),
    }
}

fn call(c: &Call) -> String {
    let mut s = match &c.target {
        Some(t) => format!("{t}.{}", c.routine),
        None => c.routine.clone(),
    };
    if !c.actuals.is_empty() {
        let args: Vec<String> = c.actuals.iter().map(ToString::to_string).collect();
        let _ = write!(s, "({})", args.join(", "));
    }
    s
}

fn print_instr(out: &mut String, i: &Instr, depth: usize) {
    let pad = "  ".repeat(depth);
    out.push_str(&pad);
    if let Some(l) = &i.point.label {
        let _ = write!(out, "{l}: ");
    }
    match &i.kind {
        InstrKind::Assign { target, source } => {
            let rhs = match source {
                Source::Path(p) => p.to_string(),
                Source::Void => "Void".into(),
                Source::Call(c) => call(c),
            };
            let _ = writeln!(out, "{target} := {rhs}");
        }
        InstrKind::Create { target } => {
            let _ = writeln!(out, "create {target}");
        }
        InstrKind::Compound(v) => {
            // Labeled compounds never come out of the parser.
            out.push('\n');
            v.iter().for_each(|j| print_instr(out, j, depth));
        }
        InstrKind::Choice(branches) => {
            out.push_str("then\n");
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    let kw = if k + 1 == branches.len() { "else" } else { "elseif" };
                    let _ = writeln!(out, "{pad}{kw}");
                }
                print_block(out, b, depth + 1);
            }
            let _ = writeln!(out, "{pad}end");
        }
        InstrKind::Guard { cond, body } => {
            let _ = writeln!(out, "if {cond}:");
            print_block(out, body, depth + 1);
            let _ = writeln!(out, "{pad}end");
        }
        InstrKind::Loop { body } => {
            out.push_str("loop\n");
            print_block(out, body, depth + 1);
            let _ = writeln!(out, "{pad}end");
        }
        InstrKind::Call(c) => {
            let _ = writeln!(out, "{}", call(c));
        }
    }
}
