use std::collections::BTreeMap;

use super::model::emit_model;
use super::syntax::{DotDocument, DotEdge, DotNode};
use crate::determinize::DeterministicModel;
use crate::graph::{StateId, TesterGraph};
use crate::refusal::RefusalSet;

fn node_id(t: &TesterGraph, s: StateId) -> String {
    if t.is_fail(s) {
        "fail".to_string()
    } else {
        format!("n{s}")
    }
}

/// Canonical `(forb, perm, temp)` strings of a refusal set.
pub fn refusal_strings(r: &RefusalSet) -> (String, String, String) {
    let forb: Vec<&str> = r.forbidden.iter().map(|a| a.as_str()).collect();
    let perm: Vec<String> = r.permanent.iter().map(ToString::to_string).collect();
    let temp: Vec<String> = r.temporary.iter().map(ToString::to_string).collect();
    (forb.join(","), perm.join(","), temp.join(","))
}

/// Writes a region graph or tester. Localities become nodes `n<index>` (the
/// sink is `fail`), carrying their base location, region and refusals.
pub fn emit_tester(t: &TesterGraph) -> DotDocument {
    let mut doc = DotDocument::new(if t.is_tester() { "tester" } else { "trrg" });
    for (s, state) in t.states().iter().enumerate() {
        let mut attrs = Vec::new();
        if !t.is_fail(s) {
            let (forb, perm, temp) = refusal_strings(&state.refusals);
            attrs.push(("base".to_string(), state.base.clone()));
            attrs.push(("region".to_string(), t.region_text(s)));
            attrs.push(("forb".to_string(), forb));
            attrs.push(("perm".to_string(), perm));
            attrs.push(("temp".to_string(), temp));
        }
        if s == t.initial() {
            attrs.push(("initial".to_string(), "true".to_string()));
        }
        if state.is_final {
            attrs.push(("final".to_string(), "true".to_string()));
        }
        if let Some(v) = t.verdict(s) {
            attrs.push(("verdict".to_string(), v.to_string()));
        }
        doc.nodes.push(DotNode { id: node_id(t, s), attrs, line: 0 });
    }
    let mut edges: Vec<_> = t
        .edges()
        .iter()
        .map(|e| {
            let key = (e.source, e.action.clone(), e.target, t.witness_text(&e.witness));
            (key, e)
        })
        .collect();
    edges.sort_by(|a, b| a.0.cmp(&b.0));
    for ((_, _, _, witness), e) in edges {
        let mut attrs = vec![("label".to_string(), e.action.to_string()), ("witness".to_string(), witness)];
        if let Some(x) = &e.reset {
            attrs.push(("reset".to_string(), x.to_string()));
        }
        doc.edges.push(DotEdge { source: node_id(t, e.source), target: node_id(t, e.target), attrs, line: 0 });
    }
    doc
}

/// The determinized model with each location's refusals as node attributes.
pub fn emit_decorated(d: &DeterministicModel, decorations: &BTreeMap<String, RefusalSet>) -> DotDocument {
    let mut doc = emit_model(&d.model);
    doc.name = Some("decorated".to_string());
    for node in &mut doc.nodes {
        if let Some(r) = decorations.get(&node.id) {
            let (forb, perm, temp) = refusal_strings(r);
            node.attrs.push(("forb".to_string(), forb));
            node.attrs.push(("perm".to_string(), perm));
            node.attrs.push(("temp".to_string(), temp));
        }
    }
    doc
}
