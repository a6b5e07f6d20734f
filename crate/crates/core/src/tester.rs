//! Canonical tester: the region graph plus a `fail` sink absorbing every
//! action the model does not permit, and per-locality verdicts.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::graph::{StateId, SymbolicEdge, SymbolicState, TesterGraph, Verdict, Witness};
use crate::model::Action;
use crate::refusal::RefusalSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TesterError {
    #[error("input graph already has a fail sink")]
    AlreadyTester,
}

pub fn build_tester(trrg: TesterGraph) -> Result<TesterGraph, TesterError> {
    if trrg.is_tester() || trrg.fail_sink().is_some() {
        return Err(TesterError::AlreadyTester);
    }
    let mut t = trrg;
    let n = t.states().len();
    let fail = t.push_state(SymbolicState {
        base: "fail".to_string(),
        region: t.clocks().initial_region(),
        refusals: RefusalSet::default(),
        is_final: false,
        is_initial: false,
    });
    let alphabet: Vec<Action> = t.alphabet().iter().cloned().collect();
    for s in 0..n {
        let closure = t.clocks().succ_closure(&t.state(s).region);
        let mut firing: HashMap<&Action, BTreeSet<usize>> = HashMap::new();
        for &e in t.outgoing(s) {
            let edge = t.edge(e);
            if let Witness::Region(w) = &edge.witness {
                if let Some(i) = closure.iter().position(|r| r == w) {
                    firing.entry(&edge.action).or_default().insert(i);
                }
            }
        }
        let mut extra = Vec::new();
        for a in &alphabet {
            match firing.get(a) {
                None => extra.push(SymbolicEdge {
                    source: s,
                    action: a.clone(),
                    witness: Witness::Any,
                    reset: None,
                    target: fail,
                }),
                Some(w) => {
                    for (_, r) in closure.iter().enumerate().filter(|(i, _)| !w.contains(i)) {
                        extra.push(SymbolicEdge {
                            source: s,
                            action: a.clone(),
                            witness: Witness::Region(r.clone()),
                            reset: None,
                            target: fail,
                        });
                    }
                }
            }
        }
        for e in extra {
            t.add_edge(e);
        }
    }
    let verdicts = (0..=n)
        .map(|s| {
            if s == fail {
                Verdict::Fail
            } else if !t.state(s).refusals.permanent.is_empty() {
                Verdict::Incon
            } else {
                Verdict::Pass
            }
        })
        .collect();
    Ok(t.into_tester(fail, verdicts))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gap {
    Missing { state: String, action: Action, region: String },
    Overlap { state: String, action: Action, region: String, edges: usize },
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Missing { state, action, region } => {
                write!(f, "no edge for ({state}, {action}, {region})")
            }
            Gap::Overlap { state, action, region, edges } => {
                write!(f, "{edges} edges for ({state}, {action}, {region})")
            }
        }
    }
}

/// Every non-fail locality must classify every action in every reachable
/// region by exactly one edge.
pub fn completeness_check(t: &TesterGraph) -> Vec<Gap> {
    let mut gaps = Vec::new();
    for s in 0..t.states().len() {
        if t.is_fail(s) {
            continue;
        }
        let mut by_action: HashMap<&Action, Vec<&Witness>> = HashMap::new();
        for &e in t.outgoing(s) {
            let edge = t.edge(e);
            by_action.entry(&edge.action).or_default().push(&edge.witness);
        }
        let closure = t.clocks().succ_closure(&t.state(s).region);
        for a in t.alphabet() {
            let ws = by_action.get(a).map(Vec::as_slice).unwrap_or(&[]);
            for r in &closure {
                let count = ws.iter().filter(|w| w.matches(r)).count();
                if count == 1 {
                    continue;
                }
                let state = t.state_label(s);
                let region = t.clocks().render(r);
                gaps.push(if count == 0 {
                    Gap::Missing { state, action: a.clone(), region }
                } else {
                    Gap::Overlap { state, action: a.clone(), region, edges: count }
                });
            }
        }
    }
    gaps
}

/// Verdict of the locality reached by following `path` edges; `None` when
/// the edges do not chain from the initial locality.
pub fn verdict_after(t: &TesterGraph, path: &[SymbolicEdge]) -> Option<Verdict> {
    let mut s: StateId = t.initial();
    for e in path {
        if e.source != s {
            return None;
        }
        s = e.target;
    }
    t.verdict(s)
}
