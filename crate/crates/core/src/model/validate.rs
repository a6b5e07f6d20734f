use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{is_location_name, is_token, Guard, TimedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// What the diagnostic is about, e.g. `edge s0 -[true, a, x]-> s1`.
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    fn error(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, subject: subject.into(), message: message.into() }
    }

    fn warning(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, subject: subject.into(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.subject, self.message)
    }
}

/// Checks well-formedness. The model is usable downstream iff no diagnostic
/// has error severity.
pub fn validate_model(m: &TimedModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for loc in &m.locations {
        let subject = format!("location {}", loc.name);
        if !is_location_name(&loc.name) {
            out.push(Diagnostic::error(&subject, "invalid location name"));
        }
        if !seen.insert(loc.name.as_str()) {
            out.push(Diagnostic::error(&subject, "duplicate location name"));
        }
        for g in &loc.durations {
            check_guard(m, g, &subject, "duration", &mut out);
        }
    }
    if m.find_location(&m.initial).is_none() {
        out.push(Diagnostic::error(format!("location {}", m.initial), "initial location is not declared"));
    }
    for c in &m.clocks {
        if !is_token(c.as_str()) {
            out.push(Diagnostic::error(format!("clock {c}"), "invalid clock name"));
        }
    }
    for a in &m.alphabet {
        if !is_token(a.as_str()) {
            out.push(Diagnostic::error(format!("action {a}"), "invalid action name"));
        }
    }

    let mut resetters: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &m.edges {
        let subject = format!("edge {e}");
        for (role, name) in [("source", &e.source), ("target", &e.target)] {
            if m.find_location(name).is_none() {
                out.push(Diagnostic::error(&subject, format!("undeclared {role} location `{name}`")));
            }
        }
        if !m.alphabet.contains(&e.action) {
            out.push(Diagnostic::error(&subject, format!("undeclared action `{}`", e.action)));
        }
        if !m.clocks.contains(&e.reset) {
            out.push(Diagnostic::error(&subject, format!("undeclared reset clock `{}`", e.reset)));
        }
        check_guard(m, &e.guard, &subject, "guard", &mut out);
        resetters.entry(e.reset.as_str()).or_default().insert(e.action.as_str());
    }

    for (clock, actions) in resetters {
        if actions.len() > 1 {
            let list: Vec<&str> = actions.into_iter().collect();
            out.push(Diagnostic::warning(
                format!("clock {clock}"),
                format!("reset by several actions ({}); one clock per action is expected", list.join(", ")),
            ));
        }
    }
    out
}

fn check_guard(m: &TimedModel, g: &Guard, subject: &str, what: &str, out: &mut Vec<Diagnostic>) {
    let mut unknown = BTreeSet::new();
    for c in g.clocks() {
        if !m.clocks.contains(c) && unknown.insert(c.as_str()) {
            out.push(Diagnostic::error(subject, format!("{what} uses undeclared clock `{c}`")));
        }
    }
    if !g.is_satisfiable() {
        out.push(Diagnostic::error(subject, format!("{what} `{g}` is unsatisfiable")));
    }
}
