//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and fails if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use aliasgraph::calculus::{analyze, Analysis, Config};
use aliasgraph::lang::Program;
use aliasgraph::query::{deutsch_properties, DeutschNames, Verdict};
use aliasgraph::{AliasDiagram, ExprUniverse, Label, PathExpr};
use rand::rngs::StdRng;
use rand::SeedableRng;

mod concrete;
mod figures;
mod gen;
mod naive;

type Check = Result<(), String>;
type Criterion = (&'static str, Box<dyn Fn() -> Check>);

const RANDOM_PROGRAMS: u64 = 1000;
const LOOP_PROGRAMS: u64 = 30;

pub fn parse(src: &str) -> Program {
    Program::parse(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn run(prog: &Program, entry: &str, init: Option<AliasDiagram>) -> Analysis {
    analyze(prog, entry, init, Config::default()).unwrap_or_else(|e| panic!("{e}"))
}

pub fn p(s: &str) -> PathExpr {
    PathExpr::parse(s)
}

fn universe(prog: &Program) -> Vec<PathExpr> {
    prog.universe().iter().filter(|p| !p.is_current()).cloned().collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn deutsch() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let started = Instant::now();
    for name in ["deutsch.oo", "deutsch_list.oo"] {
        let src = std::fs::read_to_string(dir.join(name)).map_err(|e| e.to_string())?;
        let a = run(&parse(&src), "main", None);
        let props = deutsch_properties(&a, &DeutschNames::default(), 3);
        ensure(props.values().all(|v| *v == Verdict::Yes), || format!("{name}: {props:?}"))?;
        let (hd, tl) = (Label::user("hd"), Label::user("tl"));
        let heads = |x: &str, i: usize| {
            let mut q = p(x);
            for _ in 0..i {
                q = q.push(tl.clone());
            }
            q.push(hd.clone())
        };
        for g in &a.snapshots["L2"] {
            let unaliased_root = g.roots().iter().any(|&r| {
                (0..=3).all(|i| {
                    (0..=3).all(|j| {
                        g.value_set_from([r], &heads("X", i)).is_disjoint(&g.value_set_from([r], &heads("Y", j)))
                    })
                })
            });
            ensure(unaliased_root, || format!("{name}: every component aliases heads of X and Y at L2"))?;
        }
    }
    let took = started.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))
}

fn flow_sensitivity() -> Check {
    let src = "class C\nfeature\n  a, b, x: C\n  main do\n    then\n      a := x\n    else\n      b := x\n    end\n  end\nend\n";
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("x", 0, 2), ("b", 0, 3)]);
    let prog = parse(src);
    let a = run(&prog, "main", Some(init));
    let u = prog.universe();
    let g = &a.diagram;
    ensure(!g.alias_set(&p("b"), &u).contains(&p("a")), || "a aliased to b".into())?;
    ensure(g.alias_set(&p("a"), &u).contains(&p("x")), || "x not aliased to a".into())?;
    for &r in g.roots() {
        let at = |q: &str| g.value_set_from([r], &p(q));
        let (ax, bx) = (!at("a").is_disjoint(&at("x")), !at("b").is_disjoint(&at("x")));
        ensure(ax != bx, || format!("root {r:?}: a~x {ax}, b~x {bx}"))?;
    }
    Ok(())
}

fn call_site_sensitivity() -> Check {
    let src = "class C\nfeature\n  a, b, x: C\n  set_x (v: C) do\n    x := v\n  end\n  main do\n    set_x (a)\n    set_x (b)\n  end\nend\n";
    let init = AliasDiagram::from_edges(&[0], &[("a", 0, 1), ("b", 0, 2)]);
    let prog = parse(src);
    let a = run(&prog, "main", Some(init));
    let u = prog.universe();
    let of_x: BTreeSet<PathExpr> = a.diagram.alias_set(&p("x"), &u).into_iter().filter(|q| q != &p("x")).collect();
    ensure(of_x == BTreeSet::from([p("b")]), || format!("aliases of x: {of_x:?}"))?;
    ensure(!a.diagram.may_alias(&p("a"), &p("b")), || "a aliased to b".into())
}

fn random_programs() -> Vec<(String, Program)> {
    (0..RANDOM_PROGRAMS)
        .map(|seed| {
            let src = gen::Gen::new(StdRng::seed_from_u64(seed)).program();
            let prog = parse(&src);
            (src, prog)
        })
        .collect()
}

fn loop_programs() -> Vec<(String, Program)> {
    (0..LOOP_PROGRAMS)
        .map(|seed| {
            let src = gen::Gen::new(StdRng::seed_from_u64(1000 + seed)).loop_program();
            let prog = parse(&src);
            (src, prog)
        })
        .collect()
}

fn body(prog: &Program) -> &aliasgraph::lang::Instr {
    &prog.class("C").and_then(|c| c.routine("main")).expect("C.main").body
}

fn compare_with_naive(src: &str, prog: &Program) -> Check {
    let a = run(prog, "main", None);
    ensure(a.stats.ceilings == 0, || format!("ceiling hit\n{src}"))?;
    let worlds = naive::exec(vec![naive::World::new()], body(prog));
    let u = universe(prog);
    let eu = ExprUniverse::from_exprs(u.iter().cloned());
    for q in &u {
        let mut got = a.diagram.alias_set(q, &eu);
        got.remove(q);
        let want = naive::alias_set(&worlds, q, u.iter());
        ensure(got == want, || format!("alias set of {q}: analysis {got:?}, reference {want:?}\n{src}"))?;
    }
    Ok(())
}

fn oracle_equivalence() -> Check {
    for (src, prog) in random_programs() {
        compare_with_naive(&src, &prog)?;
    }
    for (src, prog) in loop_programs() {
        compare_with_naive(&src, &prog)?;
    }
    Ok(())
}

fn soundness() -> Check {
    for (src, prog) in random_programs() {
        let a = run(&prog, "main", None);
        let heaps = concrete::exec(vec![concrete::Heap::new()], body(&prog));
        let u = universe(&prog);
        for (x, y) in concrete::alias_pairs(&heaps, u.iter()) {
            ensure(a.diagram.may_alias(&x, &y), || format!("missed {x} ~ {y}\n{src}"))?;
        }
    }
    Ok(())
}

fn termination(started: Instant) -> Check {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut files: Vec<_> = ["tests/fixtures", "../cli/tests/corpus"]
        .iter()
        .flat_map(|d| std::fs::read_dir(root.join(d)).into_iter().flatten())
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|f| f.extension().is_some_and(|x| x == "oo"))
        .collect();
    files.sort();
    let mut sources: Vec<(String, String)> = files
        .iter()
        .map(|f| (f.display().to_string(), std::fs::read_to_string(f).expect("readable corpus")))
        .collect();
    sources.extend(random_programs().into_iter().chain(loop_programs()).map(|(s, _)| ("random".to_string(), s)));
    for (name, src) in &sources {
        let prog = parse(src);
        let Some(entry) = ["main", "B.call_set"].into_iter().find(|e| prog.entry(e).is_ok()) else {
            continue;
        };
        let a = analyze(&prog, entry, None, Config { cap: 1, ..Config::default() }).map_err(|e| format!("{name}: {e}"))?;
        ensure(a.stats.ceilings == 0, || format!("{name}: iteration ceiling hit"))?;
    }
    let took = started.elapsed();
    ensure(took < Duration::from_secs(30), || format!("suite took {took:?}"))
}

#[test]
fn acceptance() {
    let started = Instant::now();
    let criteria: Vec<Criterion> = vec![
        ("list-copy properties P1-P5 at depth 3", Box::new(deutsch)),
        ("figure diagrams reproduced up to isomorphism", Box::new(figures::all)),
        ("flow sensitivity", Box::new(flow_sensitivity)),
        ("call-site sensitivity", Box::new(call_site_sensitivity)),
        ("equivalence with whole-diagram cloning and iterated-union loops", Box::new(oracle_equivalence)),
        ("soundness against concrete enumeration", Box::new(soundness)),
        ("termination under 30 s with cap 1", Box::new(move || termination(started))),
    ];
    let mut failed = Vec::new();
    for (name, check) in &criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
