//! Region automaton over a determinized, decorated model, and the pipeline
//! producing the timed refusals region graph.
//!
//! From locality `(q, r)`, a model edge `(q, g, a, x, q')` yields one graph
//! edge per time successor `r''` of `r` (including `r` itself) with
//! `r'' ⊨ g`, leading to `(q', r''[x←0])`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::determinize::{determinize, DeterministicModel, DeterminizeError};
use crate::graph::{StateId, SymbolicEdge, SymbolicState, TesterGraph, Witness};
use crate::model::{Action, TimedModel};
use crate::refusal::{decorate, RefusalSet};
use crate::region::{ClockRegion, CompiledGuard, MaxConstants};

struct CompiledEdge {
    action: Action,
    guard: CompiledGuard,
    reset: usize,
    target: usize,
}

pub fn build_ara(d: &DeterministicModel, decorations: &BTreeMap<String, RefusalSet>) -> TesterGraph {
    let model = &d.model;
    let mc = MaxConstants::of_model(model);
    let loc_index: HashMap<&str, usize> =
        model.locations.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
    let mut out_edges: Vec<Vec<CompiledEdge>> = (0..model.locations.len()).map(|_| Vec::new()).collect();
    for e in &model.edges {
        out_edges[loc_index[e.source.as_str()]].push(CompiledEdge {
            action: e.action.clone(),
            guard: mc.compile(&e.guard).expect("validated model"),
            reset: mc.index_of(e.reset.as_str()).expect("validated model"),
            target: loc_index[e.target.as_str()],
        });
    }

    let mut states: Vec<SymbolicState> = Vec::new();
    let mut ids: HashMap<(usize, ClockRegion), StateId> = HashMap::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern =
        |loc: usize, region: ClockRegion, states: &mut Vec<SymbolicState>, queue: &mut VecDeque<StateId>| {
            *ids.entry((loc, region.clone())).or_insert_with(|| {
                let l = &model.locations[loc];
                states.push(SymbolicState {
                    base: l.name.clone(),
                    region,
                    refusals: decorations.get(&l.name).cloned().unwrap_or_default(),
                    is_final: l.is_final,
                    is_initial: states.is_empty(),
                });
                queue.push_back(states.len() - 1);
                states.len() - 1
            })
        };

    let initial = intern(loc_index[model.initial.as_str()], mc.initial_region(), &mut states, &mut queue);
    while let Some(s) = queue.pop_front() {
        let loc = loc_index[states[s].base.as_str()];
        let closure = mc.succ_closure(&states[s].region);
        for e in &out_edges[loc] {
            for r in closure.iter().filter(|r| mc.entails(r, &e.guard)) {
                let target = intern(e.target, mc.reset_index(r, e.reset), &mut states, &mut queue);
                edges.push(SymbolicEdge {
                    source: s,
                    action: e.action.clone(),
                    witness: Witness::Region(r.clone()),
                    reset: Some(mc.clocks()[e.reset].clone()),
                    target,
                });
            }
        }
    }
    TesterGraph::new(mc, model.alphabet.clone(), states, initial, edges)
}

/// Determinize, decorate, and build the region automaton.
pub fn build_trrg(m: &TimedModel) -> Result<TesterGraph, DeterminizeError> {
    let d = determinize(m)?;
    Ok(build_ara(&d, &decorate(&d)))
}

/// Same as [`build_trrg`], also returning the determinized model.
pub fn build_trrg_with_model(m: &TimedModel) -> Result<(DeterministicModel, TesterGraph), DeterminizeError> {
    let d = determinize(m)?;
    let g = build_ara(&d, &decorate(&d));
    Ok((d, g))
}

/// Violations of "no two edges share (source, action, witness)".
pub fn determinism_violations(g: &TesterGraph) -> Vec<String> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if let Some(prev) = seen.insert((e.source, e.action.clone(), e.witness.clone()), i) {
            out.push(format!(
                "edges {prev} and {i} share ({}, {}, {})",
                g.state_label(e.source),
                e.action,
                g.witness_text(&e.witness)
            ));
        }
    }
    out
}

/// Re-checks every edge of a region graph against the determinized model:
/// the witness is a time successor of the source region, it entails the
/// guard of a matching model edge, and the target is the reset image.
pub fn edge_violations(g: &TesterGraph, d: &DeterministicModel) -> Vec<String> {
    let mc = g.clocks();
    let mut out = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if g.is_fail(e.target) {
            continue;
        }
        let src = g.state(e.source);
        let tgt = g.state(e.target);
        let Witness::Region(w) = &e.witness else {
            out.push(format!("edge {i}: catch-all witness on a non-fail edge"));
            continue;
        };
        if !mc.succ_closure(&src.region).contains(w) {
            out.push(format!("edge {i}: witness is not a time successor of the source region"));
        }
        let ok = d.model.outgoing(&src.base).any(|me| {
            me.action == e.action
                && me.target == tgt.base
                && Some(&me.reset) == e.reset.as_ref()
                && mc.region_entails(w, &me.guard).unwrap_or(false)
                && mc.region_reset(w, me.reset.as_str()).ok().as_ref() == Some(&tgt.region)
        });
        if !ok {
            out.push(format!("edge {i}: no model edge justifies {} -{}-> {}", src.base, e.action, tgt.base));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CmpOp, Edge, Guard, Location};

    fn fig1() -> TimedModel {
        TimedModel::new("s0")
            .location(Location::new("s1").with_duration(Guard::atom("x", CmpOp::Ge, 2)))
            .location(Location::new("s2").final_())
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 2), "b", "y", "s2"))
    }

    #[test]
    fn fig1_region_graph() {
        let g = build_trrg(&fig1()).unwrap();
        let labels: Vec<String> = (0..g.states().len()).map(|s| g.state_label(s)).collect();
        assert_eq!(labels, ["s0 | x=0, y=0", "s1 | x=0, y=0", "s1 | x=0, y>0", "s2 | x=2, y=0", "s2 | x>2, y=0"]);
        assert_eq!(g.edges().len(), 10);
        assert!(determinism_violations(&g).is_empty());
        let d = determinize(&fig1()).unwrap();
        assert!(edge_violations(&g, &d).is_empty());
        assert!(g.state(3).is_final && g.state(4).is_final && !g.state(0).is_final);
        assert!(g.state(0).is_initial && !g.state(1).is_initial);
    }

    #[test]
    fn edge_free_model() {
        let g = build_trrg(&TimedModel::new("only")).unwrap();
        assert_eq!(g.states().len(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn true_guard_collapses_identical_resets() {
        // one clock x, c_x = 2 through the duration decoration
        let m = TimedModel::new("s0")
            .location(Location::new("s1").with_duration(Guard::atom("x", CmpOp::Ge, 2)))
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"));
        let g = build_trrg(&m).unwrap();
        // six witnesses, all reset to x=0
        assert_eq!(g.outgoing(0).len(), 6);
        assert_eq!(g.states().len(), 2);
    }

    #[test]
    fn coffee_machine_has_permanent_refusals() {
        let m = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s1"))
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s2"))
            .edge(Edge::new("s1", Guard::always(), "coffee", "y", "s3"))
            .edge(Edge::new("s2", Guard::always(), "tea", "y", "s4"));
        let g = build_trrg(&m).unwrap();
        assert!(g.states().iter().any(|s| !s.refusals.permanent.is_empty()));
    }
}
