//! Random programs over one class whose attributes all have the class type.

use rand::rngs::StdRng;
use rand::Rng;

pub struct Gen {
    rng: StdRng,
    vars: usize,
    budget: usize,
}

impl Gen {
    pub fn new(rng: StdRng) -> Self {
        Gen { rng, vars: 0, budget: 0 }
    }

    fn var(&mut self) -> String {
        format!("v{}", self.rng.gen_range(0..self.vars))
    }

    fn cond(&mut self) -> String {
        let (a, b) = (self.var(), self.var());
        match self.rng.gen_range(0..5) {
            0 => format!("{a} = {b}"),
            1 => format!("{a} /= {b}"),
            2 => format!("{a} = Void"),
            3 => format!("{a} /= Void"),
            _ => format!("not ({a}.{b} = {b})"),
        }
    }

    fn simple(&mut self) -> String {
        let (a, b, c) = (self.var(), self.var(), self.var());
        match self.rng.gen_range(0..6) {
            0 => format!("{a} := {b}"),
            1 => format!("{a} := {b}.{c}"),
            2 => format!("{a}.{b} := {c}"),
            3 => format!("{a} := Void"),
            _ => format!("create {a}"),
        }
    }

    /// Plain assignments only (no creation), for loop bodies.
    fn assignment(&mut self) -> String {
        let (a, b, c) = (self.var(), self.var(), self.var());
        match self.rng.gen_range(0..4) {
            0 => format!("{a} := {b}"),
            1 => format!("{a} := {b}.{c}"),
            2 => format!("{a}.{b} := {c}"),
            _ => format!("{a} := Void"),
        }
    }

    fn block(&mut self, depth: usize, max_len: usize, out: &mut Vec<String>, indent: usize) {
        let n = self.rng.gen_range(1..=max_len);
        for _ in 0..n {
            if self.budget == 0 {
                break;
            }
            self.budget -= 1;
            let pad = " ".repeat(indent);
            let kind = if depth >= 2 || self.budget < 2 { 0 } else { self.rng.gen_range(0..8) };
            match kind {
                5 => {
                    out.push(format!("{pad}then"));
                    self.block(depth + 1, 2, out, indent + 2);
                    out.push(format!("{pad}else"));
                    self.block(depth + 1, 2, out, indent + 2);
                    out.push(format!("{pad}end"));
                }
                6 => {
                    let c = self.cond();
                    out.push(format!("{pad}if {c} then"));
                    self.block(depth + 1, 2, out, indent + 2);
                    out.push(format!("{pad}else"));
                    self.block(depth + 1, 2, out, indent + 2);
                    out.push(format!("{pad}end"));
                }
                7 => {
                    let c = self.cond();
                    out.push(format!("{pad}if {c}:"));
                    self.block(depth + 1, 2, out, indent + 2);
                    out.push(format!("{pad}end"));
                }
                _ => {
                    let s = self.simple();
                    out.push(format!("{pad}{s}"));
                }
            }
        }
    }

    fn wrap(&self, lines: &[String]) -> String {
        let attrs: Vec<String> = (0..self.vars).map(|i| format!("v{i}")).collect();
        let body = if lines.is_empty() { String::new() } else { lines.join("\n") + "\n" };
        format!("class C\nfeature\n  {}: C\n  main do\n{body}  end\nend\n", attrs.join(", "))
    }

    /// Loop- and call-free program of at most 12 instructions over at most
    /// six variables, with choices, conditionals and guards.
    pub fn program(&mut self) -> String {
        self.vars = self.rng.gen_range(2..=6);
        self.budget = 12;
        let mut lines = Vec::new();
        // Start from a few objects so updates have something to act on.
        for i in 0..self.rng.gen_range(1..=2usize.min(self.vars)) {
            lines.push(format!("    create v{i}"));
            self.budget -= 1;
        }
        while self.budget > 0 {
            self.block(0, 4, &mut lines, 4);
        }
        self.wrap(&lines)
    }

    /// A straight-line prefix building a small structure, then a loop of
    /// at most three assignments.
    pub fn loop_program(&mut self) -> String {
        self.vars = self.rng.gen_range(2..=4);
        let mut lines = Vec::new();
        for i in 0..self.vars {
            lines.push(format!("    create v{i}"));
        }
        for _ in 0..self.rng.gen_range(1..=4) {
            let (a, b, c) = (self.var(), self.var(), self.var());
            lines.push(format!("    {a}.{b} := {c}"));
        }
        lines.push("    loop".into());
        for _ in 0..self.rng.gen_range(1..=3) {
            let s = self.assignment();
            lines.push(format!("      {s}"));
        }
        lines.push("    end".into());
        self.wrap(&lines)
    }
}
