//! DOT frontend: reads models written in the DOT dialect below and writes
//! models, region graphs and testers back out.
//!
//! Model dialect (directed graph, node id = location name):
//!
//! | element | attribute   | value                                  |
//! |---------|-------------|----------------------------------------|
//! | graph   | `actions`   | `a,b,c`, extends the alphabet (optional) |
//! | node    | `initial`   | `"true"` on exactly one node           |
//! | node    | `final`     | `"true"` or absent                     |
//! | node    | `durations` | `<guard>(;<guard>)*` or absent         |
//! | edge    | `label`     | action name                            |
//! | edge    | `reset`     | clock name                             |
//! | edge    | `guard`     | `<atom>( & <atom>)*`, absent = true    |
//!
//! Atoms are `<clock><op><nat>` with `op` one of `<`, `<=`, `=`, `>=`, `>`.
//! The clock set is the set of clocks reset by some edge.

mod model;
mod syntax;
mod tester;

pub use model::{emit_model, parse_model, parse_model_text};
pub use syntax::{attr, Attrs, DotDocument, DotEdge, DotNode};
pub use tester::{emit_decorated, emit_tester, refusal_strings};

use crate::model::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DotError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("no node carries initial=\"true\"")]
    NoInitial,
    #[error("several initial nodes: {}", .0.join(", "))]
    MultipleInitial(Vec<String>),
    #[error("{subject}: malformed {attribute} attribute {value:?}: {reason}")]
    MalformedAttribute { subject: String, attribute: String, value: String, reason: String },
    #[error("invalid model:\n{}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}
