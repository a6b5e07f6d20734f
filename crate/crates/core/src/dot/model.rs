use std::collections::BTreeSet;

use super::syntax::{attr, DotDocument, DotEdge, DotNode};
use super::DotError;
use crate::model::{edge_sort_key, is_token, validate_model, Action, Clock, Edge, Guard, Location, TimedModel};

fn malformed(subject: String, attribute: &str, value: &str, reason: impl Into<String>) -> DotError {
    DotError::MalformedAttribute {
        subject,
        attribute: attribute.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn flag(node: &DotNode, key: &str) -> Result<bool, DotError> {
    match attr(&node.attrs, key) {
        None | Some("false") => Ok(false),
        Some("true") => Ok(true),
        Some(other) => Err(malformed(
            format!("node {} (line {})", node.id, node.line),
            key,
            other,
            "expected \"true\" or \"false\"",
        )),
    }
}

fn guard(subject: impl Fn() -> String, key: &str, text: &str) -> Result<Guard, DotError> {
    text.parse::<Guard>().map_err(|e| malformed(subject(), key, text, e.reason))
}

pub fn parse_model_text(text: &str) -> Result<TimedModel, DotError> {
    parse_model(&DotDocument::parse(text)?)
}

/// Builds a validated model from a document in the model dialect.
pub fn parse_model(doc: &DotDocument) -> Result<TimedModel, DotError> {
    let mut locations = Vec::with_capacity(doc.nodes.len());
    let mut initials = Vec::new();
    for node in &doc.nodes {
        let subject = || format!("node {} (line {})", node.id, node.line);
        if flag(node, "initial")? {
            initials.push(node.id.clone());
        }
        let mut loc = Location::new(node.id.clone());
        loc.is_final = flag(node, "final")?;
        if let Some(text) = attr(&node.attrs, "durations") {
            for part in text.split(';').filter(|p| !p.trim().is_empty()) {
                loc.durations.push(guard(subject, "durations", part)?);
            }
        }
        locations.push(loc);
    }
    let initial = match initials.len() {
        0 => return Err(DotError::NoInitial),
        1 => initials.pop().expect("one element"),
        _ => return Err(DotError::MultipleInitial(initials)),
    };

    let mut alphabet: BTreeSet<Action> = BTreeSet::new();
    if let Some(list) = doc.graph_attr("actions") {
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !is_token(name) {
                return Err(malformed("graph".into(), "actions", list, format!("bad action name `{name}`")));
            }
            alphabet.insert(Action::from(name));
        }
    }

    let mut clocks = BTreeSet::new();
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        edges.push(parse_edge(e)?);
    }
    for e in &edges {
        alphabet.insert(e.action.clone());
        clocks.insert(e.reset.clone());
    }

    let model = TimedModel { locations, initial, clocks, edges, alphabet };
    let errors: Vec<_> = validate_model(&model).into_iter().filter(|d| d.is_error()).collect();
    if !errors.is_empty() {
        return Err(DotError::Invalid(errors));
    }
    Ok(model)
}

fn parse_edge(e: &DotEdge) -> Result<Edge, DotError> {
    let subject = || format!("edge {} -> {} (line {})", e.source, e.target, e.line);
    let label = attr(&e.attrs, "label").ok_or_else(|| malformed(subject(), "label", "", "missing"))?;
    if !is_token(label) {
        return Err(malformed(subject(), "label", label, "action names are letters, digits or '_'"));
    }
    let reset = attr(&e.attrs, "reset").ok_or_else(|| malformed(subject(), "reset", "", "missing"))?;
    if !is_token(reset) {
        return Err(malformed(subject(), "reset", reset, "expected a single clock name"));
    }
    let g = match attr(&e.attrs, "guard") {
        Some(text) => guard(subject, "guard", text)?,
        None => Guard::always(),
    };
    Ok(Edge {
        source: e.source.clone(),
        guard: g,
        action: Action::from(label),
        reset: Clock::from(reset),
        target: e.target.clone(),
    })
}

/// Writes `m` in the model dialect. Nodes are sorted by name and edges by
/// (source, action, target, guard), so equal models give identical text.
pub fn emit_model(m: &TimedModel) -> DotDocument {
    let canon = m.canonicalized();
    let mut doc = DotDocument::new("model");
    if !canon.alphabet.is_empty() {
        let list: Vec<&str> = canon.alphabet.iter().map(Action::as_str).collect();
        doc.graph_attrs.push(("actions".into(), list.join(",")));
    }
    for loc in &canon.locations {
        let mut attrs = Vec::new();
        if loc.name == canon.initial {
            attrs.push(("initial".to_string(), "true".to_string()));
        }
        if loc.is_final {
            attrs.push(("final".to_string(), "true".to_string()));
        }
        if !loc.durations.is_empty() {
            let list: Vec<String> = loc.durations.iter().map(Guard::to_string).collect();
            attrs.push(("durations".to_string(), list.join(";")));
        }
        doc.nodes.push(DotNode { id: loc.name.clone(), attrs, line: 0 });
    }
    let mut edges = canon.edges.clone();
    edges.sort_by_cached_key(edge_sort_key);
    for e in &edges {
        let mut attrs = vec![("label".to_string(), e.action.to_string()), ("reset".to_string(), e.reset.to_string())];
        if !e.guard.is_true() {
            attrs.push(("guard".to_string(), e.guard.to_string()));
        }
        doc.edges.push(DotEdge { source: e.source.clone(), target: e.target.clone(), attrs, line: 0 });
    }
    doc
}
