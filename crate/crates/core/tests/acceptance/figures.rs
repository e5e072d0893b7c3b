//! Small programs with hand-drawn expected diagrams. Node ids in the
//! expectations are arbitrary; comparison is up to renaming.

use aliasgraph::AliasDiagram;

use super::{parse, run, Check};

const CLASS: &str = "class C\nfeature\n  a, b, c, x, l, right: C\n";
const SET_X: &str = "  set_x (v: C) do\n    x := v\n  end\n";

struct Case {
    name: &'static str,
    routines: &'static str,
    main: &'static str,
    init: AliasDiagram,
    want: AliasDiagram,
}

fn source(routines: &str, main: &str) -> String {
    format!("{CLASS}{routines}  main do\n{main}\n  end\nend\n")
}

fn cases() -> Vec<Case> {
    let e = AliasDiagram::from_edges;
    vec![
        Case {
            name: "assignment",
            routines: "",
            main: "a := b",
            init: e(&[0], &[("a", 0, 1), ("b", 0, 2)]),
            want: e(&[0], &[("a", 0, 2), ("b", 0, 2)]),
        },
        Case {
            name: "composition",
            routines: "",
            main: "a := b\nb := c",
            init: e(&[0], &[("b", 0, 2), ("c", 0, 3)]),
            want: e(&[0], &[("a", 0, 2), ("b", 0, 3), ("c", 0, 3)]),
        },
        Case {
            name: "creation",
            routines: "",
            main: "create x",
            init: e(&[0], &[("x", 0, 1), ("a", 0, 1)]),
            want: e(&[0], &[("x", 0, 5), ("a", 0, 1)]),
        },
        Case {
            name: "loop",
            routines: "",
            main: "loop\n  l := l.right\nend",
            init: e(&[0], &[("l", 0, 1), ("right", 1, 2), ("right", 2, 3)]),
            want: e(&[0], &[("l", 0, 1), ("l", 0, 2), ("l", 0, 3), ("right", 1, 2), ("right", 2, 3)]),
        },
        Case {
            name: "unqualified call",
            routines: SET_X,
            main: "set_x (a)",
            init: e(&[0], &[("a", 0, 1)]),
            want: e(&[0], &[("a", 0, 1), ("x", 0, 1)]),
        },
        Case {
            name: "two unqualified calls",
            routines: SET_X,
            main: "set_x (a)\nset_x (b)",
            init: e(&[0], &[("a", 0, 1), ("b", 0, 2)]),
            want: e(&[0], &[("a", 0, 1), ("b", 0, 2), ("x", 0, 2)]),
        },
        Case {
            name: "qualified call",
            routines: SET_X,
            main: "a.set_x (b)",
            init: e(&[0], &[("a", 0, 1), ("b", 0, 2), ("x", 1, 4)]),
            want: e(&[0], &[("a", 0, 1), ("b", 0, 2), ("x", 1, 2)]),
        },
        Case {
            name: "conditional",
            routines: "",
            main: "then\n  a := x\nelse\n  b := x\nend",
            init: e(&[0], &[("a", 0, 1), ("x", 0, 2), ("b", 0, 3)]),
            want: e(&[0, 10], &[("b", 0, 3), ("x", 0, 2), ("a", 0, 2), ("a", 10, 1), ("x", 10, 2), ("b", 10, 2)]),
        },
    ]
}

const DYN: &str = include_str!("../fixtures/dyn_binding.oo");

pub fn all() -> Check {
    for case in cases() {
        let prog = parse(&source(case.routines, case.main));
        let got = run(&prog, "main", Some(case.init)).diagram;
        if !got.isomorphic(&case.want) {
            return Err(format!("{}: got {:?}", case.name, got.edges()));
        }
    }
    let init = AliasDiagram::from_edges(&[0], &[("t", 0, 1), ("a", 0, 4), ("b", 1, 3), ("c", 1, 2)]);
    let want = AliasDiagram::from_edges(
        &[0, 10],
        &[("t", 0, 1), ("a", 0, 4), ("b", 1, 3), ("c", 1, 4), ("a", 10, 4), ("t", 10, 11), ("c", 11, 2), ("b", 11, 4)],
    );
    let got = run(&parse(DYN), "B.call_set", Some(init)).diagram;
    if !got.isomorphic(&want) {
        return Err(format!("dynamic binding: got {:?}", got.edges()));
    }
    Ok(())
}
