//! May-alias analysis for a small object-oriented language.
//!
//! The analysis abstracts object structures as [`AliasDiagram`]s and
//! transforms them instruction by instruction. It is flow-sensitive
//! (branches keep their own root component) and call-site-sensitive
//! (every call is re-analyzed with its own arguments).

pub mod calculus;
pub mod diagram;
pub mod lang;
pub mod query;

pub use diagram::{AliasDiagram, Delta, DiagramError, Edge, ExprUniverse, Label, LabelKind, NodeId, PathExpr};
