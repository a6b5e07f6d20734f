//! Bounded timed-trace equivalence of two models, decided on the region
//! graph of their product. Clocks of the two sides are kept apart by the
//! prefixes `s.` and `i.`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::determinize::{determinize, DeterministicModel, DeterminizeError};
use crate::model::{Action, AtomicConstraint, Clock, Guard, TimedModel};
use crate::region::{ClockRegion, CompiledGuard, MaxConstants};

struct Side {
    edges: Vec<Vec<(Action, CompiledGuard, usize, usize)>>,
    initial: usize,
}

fn renamed(prefix: &str, g: &Guard) -> Guard {
    Guard::new(g.atoms().iter().map(|a| AtomicConstraint::new(format!("{prefix}{}", a.clock), a.op, a.bound)).collect())
}

fn side(d: &DeterministicModel, prefix: &str, mc: &MaxConstants) -> Side {
    let m = &d.model;
    let index: HashMap<&str, usize> = m.locations.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
    let mut edges = vec![Vec::new(); m.locations.len()];
    for e in &m.edges {
        let guard = mc.compile(&renamed(prefix, &e.guard)).expect("renamed clocks are declared");
        let reset = mc.index_of(&format!("{prefix}{}", e.reset)).expect("renamed reset is declared");
        edges[index[e.source.as_str()]].push((e.action.clone(), guard, reset, index[e.target.as_str()]));
    }
    Side { edges, initial: index[m.initial.as_str()] }
}

type Node = ((usize, usize, ClockRegion), Option<usize>, String);

fn fire<'a>(
    s: &'a Side,
    loc: usize,
    a: &Action,
    r: &ClockRegion,
    mc: &MaxConstants,
) -> Option<&'a (Action, CompiledGuard, usize, usize)> {
    s.edges[loc].iter().find(|(b, g, _, _)| b == a && mc.entails(r, g))
}

/// A timed trace (actions with the region they fire in) of length at most
/// `depth` accepted by exactly one of the two models, or `None` when the
/// models agree on all such traces.
pub fn distinguishing_trace(
    spec: &TimedModel,
    imp: &TimedModel,
    depth: usize,
) -> Result<Option<Vec<String>>, DeterminizeError> {
    let ds = determinize(spec)?;
    let di = determinize(imp)?;
    let mut bounds: BTreeMap<Clock, u32> = BTreeMap::new();
    for (prefix, m) in [("s.", &ds.model), ("i.", &di.model)] {
        let consts = m.max_constants();
        for c in &m.clocks {
            bounds.insert(Clock::from(format!("{prefix}{c}")), consts.get(c).copied().unwrap_or(0));
        }
    }
    let mc = MaxConstants::new(bounds);
    let s = side(&ds, "s.", &mc);
    let i = side(&di, "i.", &mc);
    let actions: BTreeSet<&Action> = ds.model.alphabet.iter().chain(&di.model.alphabet).collect();

    // node: (spec location, impl location, region), parent link, label
    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashMap<(usize, usize, ClockRegion), usize> = HashMap::new();
    let start = (s.initial, i.initial, mc.initial_region());
    seen.insert(start.clone(), 0);
    nodes.push((start, None, String::new()));
    let mut queue = VecDeque::from([(0usize, 0usize)]);

    let trace = |nodes: &Vec<Node>, mut n: usize, last: String| {
        let mut out = vec![last];
        while let Some(p) = nodes[n].1 {
            out.push(nodes[n].2.clone());
            n = p;
        }
        out.reverse();
        out
    };

    while let Some((n, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        let (ls, li, r) = nodes[n].0.clone();
        for r2 in mc.succ_closure(&r) {
            for &a in &actions {
                let fs = fire(&s, ls, a, &r2, &mc);
                let fi = fire(&i, li, a, &r2, &mc);
                let label = || format!("{a}@[{}]", mc.render(&r2));
                match (fs, fi) {
                    (None, None) => {}
                    (Some((_, _, xs, ts)), Some((_, _, xi, ti))) => {
                        let r3 = mc.reset_index(&mc.reset_index(&r2, *xs), *xi);
                        let key = (*ts, *ti, r3);
                        if !seen.contains_key(&key) {
                            seen.insert(key.clone(), nodes.len());
                            nodes.push((key, Some(n), label()));
                            queue.push_back((nodes.len() - 1, d + 1));
                        }
                    }
                    (Some(_), None) => {
                        return Ok(Some(trace(&nodes, n, format!("{} (only the first model)", label()))))
                    }
                    (None, Some(_)) => {
                        return Ok(Some(trace(&nodes, n, format!("{} (only the second model)", label()))))
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn equivalent_within(spec: &TimedModel, imp: &TimedModel, depth: usize) -> Result<bool, DeterminizeError> {
    Ok(distinguishing_trace(spec, imp, depth)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CmpOp, Edge, Location};

    fn fig1() -> TimedModel {
        TimedModel::new("s0")
            .location(Location::new("s1").with_duration(Guard::atom("x", CmpOp::Ge, 2)))
            .location(Location::new("s2").final_())
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 2), "b", "y", "s2"))
    }

    #[test]
    fn model_is_equivalent_to_itself() {
        assert!(equivalent_within(&fig1(), &fig1(), 6).unwrap());
    }

    #[test]
    fn narrowing_is_visible() {
        let mut imp = fig1();
        imp.edges[1].guard = Guard::atom("x", CmpOp::Ge, 3);
        let trace = distinguishing_trace(&fig1(), &imp, 6).unwrap().unwrap();
        assert_eq!(trace.len(), 2);
        assert!(trace[0].starts_with("a@"));
        assert!(trace[1].starts_with("b@") && trace[1].ends_with("(only the first model)"));
        assert!(equivalent_within(&fig1(), &imp, 1).unwrap());
    }

    #[test]
    fn retarget_to_equivalent_location() {
        // s2 and s3 are both dead ends
        let spec = fig1().location(Location::new("s3"));
        let mut imp = spec.clone();
        imp.edges[1].target = "s3".into();
        assert!(equivalent_within(&spec, &imp, 6).unwrap());
    }

    #[test]
    fn nondeterministic_split_equals_merge() {
        let split = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s2"))
            .edge(Edge::new("s1", Guard::always(), "b", "x", "s3"))
            .edge(Edge::new("s2", Guard::always(), "c", "x", "s3"));
        let merged = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s1", Guard::always(), "b", "x", "s3"))
            .edge(Edge::new("s1", Guard::always(), "c", "x", "s3"));
        assert!(equivalent_within(&split, &merged, 6).unwrap());
    }
}
