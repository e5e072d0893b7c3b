use crate::diagram::NodeId;
use crate::lang::Cond;

use super::Analyzer;

/// Three-valued outcome of a condition on one root component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl Analyzer<'_> {
    /// What the diagram proves about `c` in the component of `root`.
    pub fn evaluate_cond(&self, root: NodeId, c: &Cond) -> Truth {
        match c {
            Cond::Eq(a, b) => {
                if a == b {
                    return Truth::True;
                }
                let (va, vb) = (self.v(root, a), self.v(root, b));
                if !va.is_empty() && !vb.is_empty() && va.is_disjoint(&vb) {
                    Truth::False
                } else {
                    Truth::Unknown
                }
            }
            Cond::Neq(a, b) => self.evaluate_cond(root, &Cond::Eq(a.clone(), b.clone())).not(),
            Cond::EqVoid(a) => {
                if self.v(root, a).is_empty() {
                    Truth::True
                } else {
                    Truth::Unknown
                }
            }
            Cond::NeqVoid(a) => self.evaluate_cond(root, &Cond::EqVoid(a.clone())).not(),
            Cond::Not(c) => self.evaluate_cond(root, c).not(),
        }
    }
}
