use std::collections::BTreeSet;

use super::*;
use crate::diagram::PathExpr;
use crate::lang::Cond;

const DEUTSCH: &str = include_str!("../../tests/fixtures/deutsch.oo");
const DYN: &str = include_str!("../../tests/fixtures/dyn_binding.oo");

fn program(src: &str) -> Program {
    Program::parse(src).unwrap_or_else(|e| panic!("{e}"))
}

/// Wraps a body in a class whose attributes are all of the class type.
fn class_with(routines: &str, main: &str) -> Program {
    program(&format!(
        "class C\nfeature\n  a, b, c, x, y, l, right: C\n{routines}\n  main do\n{main}\n  end\nend\n"
    ))
}

fn run(prog: &Program, entry: &str, init: AliasDiagram) -> Analysis {
    analyze(prog, entry, Some(init), Config::default()).unwrap_or_else(|e| panic!("{e}"))
}

fn run_main(main: &str, init: AliasDiagram) -> Analysis {
    run(&class_with("", main), "C.main", init)
}

fn vs(g: &AliasDiagram, p: &str) -> BTreeSet<u32> {
    g.value_set(&PathExpr::parse(p)).into_iter().map(|n| n.0).collect()
}

fn set(ids: &[u32]) -> BTreeSet<u32> {
    ids.iter().copied().collect()
}

fn errors(a: &Analysis) -> Vec<&Diagnostic> {
    a.diagnostics.iter().filter(|d| d.severity == crate::lang::Severity::Error).collect()
}

#[test]
fn assignment_is_strong_on_the_entry_root() {
    let a = run_main("a := b", AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2)]));
    let want = AliasDiagram::from_parts(&[0], &[1], &[("a", 0, 2), ("b", 0, 2)]);
    assert!(a.diagram.isomorphic(&want));
    assert_eq!(vs(&a.diagram, "a"), set(&[2]));
}

#[test]
fn void_assignment_unlinks() {
    let a = run_main("a := Void", AliasDiagram::from_edges(&[0], &[("a", 0, 1)]));
    assert!(vs(&a.diagram, "a").is_empty());
}

#[test]
fn composition_is_flow_sensitive() {
    let a = run_main("L0: a := b\nL1: b := c", AliasDiagram::from_edges(&[0], &[("b", 0, 2), ("c", 0, 3)]));
    let l0 = &a.snapshots["L0"][0];
    let l1 = &a.snapshots["L1"][0];
    assert_eq!(vs(l0, "b"), set(&[2]));
    assert_eq!(vs(l1, "b"), set(&[3]));
    assert_eq!(vs(l1, "a"), set(&[2]));
}

#[test]
fn create_binds_a_fresh_node() {
    let a = run_main("create x", AliasDiagram::from_edges(&[0], &[("x", 0, 1)]));
    let x = vs(&a.diagram, "x");
    assert_eq!(x.len(), 1);
    assert!(!x.contains(&1) && !x.contains(&0));
}

#[test]
fn qualified_assignment_on_one_object_is_strong() {
    let a = run_main("a.x := b", AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2), ("x", 1, 3)]));
    assert_eq!(vs(&a.diagram, "a.x"), set(&[2]));
}

#[test]
fn qualified_assignment_on_void_target_warns() {
    let a = run_main("a.x := b", AliasDiagram::from_edges(&[0], &[("b", 0, 2)]));
    assert!(!a.diagnostics.is_empty());
}

#[test]
fn choice_keeps_one_component_per_branch() {
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("x", 0, 2), ("b", 0, 3)]);
    let a = run_main("then\n a := x\nelse\n b := x\nend", init);
    let want = AliasDiagram::from_edges(
        &[0, 10],
        &[("b", 0, 3), ("x", 0, 2), ("a", 0, 2), ("a", 10, 1), ("x", 10, 2), ("b", 10, 2)],
    );
    assert!(a.diagram.isomorphic(&want), "{:?}", a.diagram.edges());
    assert_eq!(vs(&a.diagram, "a"), set(&[1, 2]));
}

#[test]
fn identical_branches_do_not_clone() {
    let a = run_main("then\n a := b\nelse\n a := b\nend", AliasDiagram::from_edges(&[0], &[("b", 0, 1)]));
    assert_eq!(a.diagram.roots().len(), 1);
    assert_eq!(a.stats.clones, 0);
}

#[test]
fn loop_accumulates_every_iteration() {
    let init = AliasDiagram::from_edges(&[0], &[("l", 0, 1), ("right", 1, 2), ("right", 2, 3)]);
    let a = run_main("loop\n l := l.right\nend", init);
    assert_eq!(vs(&a.diagram, "l"), set(&[1, 2, 3]));
    assert!(a.stats.loop_iterations >= 3);
}

#[test]
fn creation_in_a_loop_is_bounded() {
    let a = run_main("loop\n create l\n l.right := a\n a := l\nend", AliasDiagram::new());
    assert!(a.diagram.nodes().len() <= 4, "{:?}", a.diagram.nodes());
    assert!(vs(&a.diagram, "l").iter().any(|&n| a.diagram.is_summary(NodeId(n))));
    assert!(errors(&a).is_empty());
}

#[test]
fn creation_cap_allows_that_many_fresh_nodes() {
    let prog = class_with("", "loop\n create l\n a := l\nend");
    let cfg = Config { cap: 3, ..Config::default() };
    let a = analyze(&prog, "C.main", None, cfg).unwrap();
    assert_eq!(vs(&a.diagram, "a").len(), 3);
}

#[test]
fn guard_on_disjoint_values_is_skipped() {
    let a = run_main("if a = b: create c end", AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2)]));
    assert!(vs(&a.diagram, "c").is_empty());
    assert_eq!(a.stats.choices, 0);
}

#[test]
fn guard_on_void_test_runs_body() {
    let a = run_main("if a = Void: create a end", AliasDiagram::new());
    assert_eq!(vs(&a.diagram, "a").len(), 1);
}

#[test]
fn guard_splitting_roots_keeps_excluded_components_unchanged() {
    // Root 5 has no `a`, so the body is excluded there.
    let init = AliasDiagram::from_edges(&[0, 5], &[("a", 0, 1), ("b", 0, 1), ("b", 5, 6)]);
    let a = run_main("if a /= Void: c := b end", init);
    let g = &a.diagram;
    for r in g.roots() {
        let c = g.value_set_from([*r], &PathExpr::parse("c"));
        let av = g.value_set_from([*r], &PathExpr::parse("a"));
        assert!(!av.is_empty() || c.is_empty(), "component {r:?} ran the body");
    }
    assert_eq!(vs(g, "c"), set(&[1]));
}

#[test]
fn evaluate_cond_rules() {
    let prog = class_with("", "a := a");
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2), ("c", 0, 1)]);
    let mut an = Analyzer::new(&prog, Config::default(), init);
    let r = NodeId(0);
    let p = |s: &str| PathExpr::parse(s);
    assert_eq!(an.evaluate_cond(r, &Cond::Eq(p("a"), p("a"))), Truth::True);
    assert_eq!(an.evaluate_cond(r, &Cond::Eq(p("a"), p("b"))), Truth::False);
    assert_eq!(an.evaluate_cond(r, &Cond::Eq(p("a"), p("c"))), Truth::Unknown);
    assert_eq!(an.evaluate_cond(r, &Cond::Neq(p("a"), p("b"))), Truth::True);
    assert_eq!(an.evaluate_cond(r, &Cond::EqVoid(p("x"))), Truth::True);
    assert_eq!(an.evaluate_cond(r, &Cond::EqVoid(p("a"))), Truth::Unknown);
    assert_eq!(an.evaluate_cond(r, &Cond::NeqVoid(p("x"))), Truth::False);
    assert_eq!(an.evaluate_cond(r, &Cond::Not(Box::new(Cond::EqVoid(p("x"))))), Truth::False);
    let _ = &mut an;
}

const SET_X: &str = "  set_x (v: C) do\n    x := v\n  end";

#[test]
fn unqualified_call_binds_formal_per_call_site() {
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2)]);
    let prog = class_with(SET_X, "L0: set_x (a)\nL1: set_x (b)");
    let a = run(&prog, "C.main", init);
    assert_eq!(vs(&a.snapshots["L0"][0], "x"), set(&[1]));
    assert_eq!(vs(&a.snapshots["L1"][0], "x"), set(&[2]));
    assert!(vs(&a.diagram, "v").is_empty(), "formal leaked into the caller");
}

#[test]
fn qualified_call_updates_the_target_object() {
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2), ("x", 1, 4)]);
    let prog = class_with(SET_X, "a.set_x (b)");
    let a = run(&prog, "C.main", init);
    let want = AliasDiagram::from_parts(&[0], &[4], &[("a", 0, 1), ("b", 0, 2), ("x", 1, 2)]);
    assert!(a.diagram.isomorphic(&want), "{:?}", a.diagram.edges());
    assert_eq!(a.diagram.roots(), &BTreeSet::from([NodeId(0)]));
}

#[test]
fn nested_qualified_calls_restore_roots() {
    let routines = "  set_x (v: C) do\n    x := v\n  end\n  relay (v: C) do\n    b.set_x (v)\n  end";
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 1, 2), ("c", 0, 3)]);
    let a = run(&class_with(routines, "a.relay (c)"), "C.main", init);
    assert_eq!(a.diagram.roots(), &BTreeSet::from([NodeId(0)]));
    assert_eq!(vs(&a.diagram, "a.b.x"), set(&[3]));
    assert!(a.diagram.edges().iter().all(|e| e.label.is_user()));
}

#[test]
fn function_result_is_assigned() {
    let routines = "  pick (v: C): C do\n    Result := v\n  end";
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1)]);
    let a = run(&class_with(routines, "b := pick (a)"), "C.main", init);
    assert_eq!(vs(&a.diagram, "b"), set(&[1]));
}

#[test]
fn call_on_void_target_is_an_error() {
    let a = run(&class_with(SET_X, "a.set_x (b)"), "C.main", AliasDiagram::new());
    assert_eq!(errors(&a).len(), 1);
}

#[test]
fn dynamic_binding_explores_every_redefinition() {
    let init = AliasDiagram::from_edges(&[0], &[("t", 0, 1), ("a", 0, 4), ("b", 1, 3), ("c", 1, 2)]);
    let a = run(&program(DYN), "B.call_set", init);
    let want = AliasDiagram::from_edges(
        &[0, 10],
        &[
            ("t", 0, 1),
            ("a", 0, 4),
            ("b", 1, 3),
            ("c", 1, 4),
            ("a", 10, 4),
            ("t", 10, 11),
            ("c", 11, 2),
            ("b", 11, 4),
        ],
    );
    assert!(a.diagram.isomorphic(&want), "{:?}", a.diagram.edges());
}

#[test]
fn recursion_terminates_and_aliases_heads() {
    let a = run(&program(DEUTSCH), "LST.main", AliasDiagram::new());
    assert!(errors(&a).is_empty(), "{:?}", a.diagnostics);
    let g = &a.snapshots["L2"][0];
    assert!(g.may_alias(&PathExpr::parse("Y.hd"), &PathExpr::parse("X.hd")) || vs(g, "X.hd").is_empty());
    assert!(!vs(g, "Y").is_empty());
    assert!(vs(g, "Y").is_disjoint(&vs(g, "X")));
}

#[test]
fn mutual_recursion_terminates() {
    let routines = "  f (v: C) do\n    x := v\n    g (v.right)\n  end\n  g (w: C) do\n    f (w)\n  end";
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("right", 1, 2), ("right", 2, 1)]);
    let a = run(&class_with(routines, "f (a)"), "C.main", init);
    assert!(errors(&a).is_empty(), "{:?}", a.diagnostics);
    let x = vs(&a.diagram, "x");
    assert!(!x.is_empty() && x.is_subset(&set(&[1, 2])), "{x:?}");
}

#[test]
fn branches_restore_the_start_diagram() {
    let prog = program(DEUTSCH);
    let cfg = Config { check_restore: true, ..Config::default() };
    let cfg2 = cfg.clone();
    let a = analyze(&prog, "LST.main", None, cfg).unwrap();
    assert_eq!(a.stats.restore_violations, 0);
    let a = analyze(&program(DYN), "B.call_set", Some(AliasDiagram::from_edges(&[0], &[("t", 0, 1)])), cfg2).unwrap();
    assert_eq!(a.stats.restore_violations, 0);
}

#[test]
fn loop_ceiling_is_reported() {
    let prog = class_with("", "loop\n create l\n l.right := a\n a := l\nend");
    let cfg = Config { max_iters: 1, ..Config::default() };
    let a = analyze(&prog, "C.main", None, cfg).unwrap();
    assert_eq!(a.stats.ceilings, 1);
    assert_eq!(errors(&a).len(), 1);
}
