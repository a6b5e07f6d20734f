//! Refusal decorations of determinized locations: forbidden actions,
//! permanent refusals `ā(g)` caused by branch choices merged during
//! determinization, and temporary refusals `ã(g)` of actions that must wait
//! for a guard.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::determinize::DeterministicModel;
use crate::model::{Action, Guard};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RefusalKind {
    Permanent,
    Temporary,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuardedRefusal {
    pub action: Action,
    pub guard: Guard,
    pub kind: RefusalKind,
}

impl fmt::Display for GuardedRefusal {
    /// `a[x>=1]`; the kind is carried by the attribute the string is stored in.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.action, self.guard)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RefusalSet {
    pub forbidden: BTreeSet<Action>,
    pub permanent: BTreeSet<GuardedRefusal>,
    pub temporary: BTreeSet<GuardedRefusal>,
}

impl RefusalSet {
    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty() && self.permanent.is_empty() && self.temporary.is_empty()
    }

    pub fn permanently_refuses(&self, action: &Action) -> impl Iterator<Item = &GuardedRefusal> {
        let action = action.clone();
        self.permanent.iter().filter(move |r| r.action == action)
    }
}

/// Alphabet minus the actions labelling outgoing edges of `q`.
pub fn forbidden_of(d: &DeterministicModel, q: &str) -> BTreeSet<Action> {
    let offered: BTreeSet<&Action> = d.model.outgoing(q).map(|e| &e.action).collect();
    d.model.alphabet.iter().filter(|a| !offered.contains(a)).cloned().collect()
}

/// `ā(g)` for every outgoing cell `g` of `q` that only some members of `q`
/// offer.
pub fn permanent_of(d: &DeterministicModel, q: &str) -> BTreeSet<GuardedRefusal> {
    let Some(members) = d.members(q) else {
        return BTreeSet::new();
    };
    let mut out = BTreeSet::new();
    for e in d.model.outgoing(q) {
        let offering = members
            .iter()
            .filter(|l| {
                d.source.outgoing(l).any(|orig| orig.action == e.action && orig.guard.canonical().includes(&e.guard))
            })
            .count();
        if offering > 0 && offering < members.len() {
            out.insert(GuardedRefusal {
                action: e.action.clone(),
                guard: e.guard.clone(),
                kind: RefusalKind::Permanent,
            });
        }
    }
    out
}

/// `ã(g)` for every outgoing edge of `q` whose guard has a strictly positive
/// lower bound.
pub fn temporary_of(d: &DeterministicModel, q: &str) -> BTreeSet<GuardedRefusal> {
    d.model
        .outgoing(q)
        .filter(|e| e.guard.has_positive_lower_bound())
        .map(|e| GuardedRefusal { action: e.action.clone(), guard: e.guard.clone(), kind: RefusalKind::Temporary })
        .collect()
}

pub fn decorate(d: &DeterministicModel) -> BTreeMap<String, RefusalSet> {
    d.model
        .locations
        .iter()
        .map(|l| {
            let q = l.name.as_str();
            let set = RefusalSet {
                forbidden: forbidden_of(d, q),
                permanent: permanent_of(d, q),
                temporary: temporary_of(d, q),
            };
            (l.name.clone(), set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::determinize;
    use crate::model::{CmpOp, Edge, Location, TimedModel};

    fn fig1() -> TimedModel {
        TimedModel::new("s0")
            .location(Location::new("s1").with_duration(Guard::atom("x", CmpOp::Ge, 2)))
            .location(Location::new("s2").final_())
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 2), "b", "y", "s2"))
    }

    fn names(set: &BTreeSet<GuardedRefusal>) -> Vec<String> {
        set.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn fig1_decoration() {
        let d = determinize(&fig1()).unwrap();
        let deco = decorate(&d);
        let s0 = &deco["s0"];
        assert_eq!(s0.forbidden, BTreeSet::from(["b".into()]));
        assert!(s0.permanent.is_empty() && s0.temporary.is_empty());
        assert_eq!(names(&deco["s1"].temporary), ["b[x>=2]"]);
        assert_eq!(deco["s1"].forbidden, BTreeSet::from(["a".into()]));
        assert_eq!(deco["s2"].forbidden.len(), 2);
        assert!(deco.values().all(|r| r.permanent.is_empty()));
    }

    #[test]
    fn partial_offer_is_permanent() {
        // s1 offers a after x>=1, s2 never does
        let m = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s1"))
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s2"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 1), "a", "y", "s3"));
        let d = determinize(&m).unwrap();
        assert_eq!(names(&permanent_of(&d, "s1+s2")), ["a[x>=1]"]);
        assert_eq!(names(&temporary_of(&d, "s1+s2")), ["a[x>=1]"]);
        assert!(permanent_of(&d, "s3").is_empty());
        assert!(permanent_of(&d, "s0").is_empty());
    }

    #[test]
    fn full_offer_is_not_permanent() {
        let m = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s1"))
            .edge(Edge::new("s0", Guard::always(), "coin", "x", "s2"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 1), "a", "y", "s3"))
            .edge(Edge::new("s2", Guard::always(), "a", "y", "s4"));
        let d = determinize(&m).unwrap();
        // cells: [0,1) offered by s2 only, [1,inf) offered by both
        assert_eq!(names(&permanent_of(&d, "s1+s2")), ["a[x<1]"]);
    }

    #[test]
    fn temporary_needs_positive_lower_bound() {
        let m = TimedModel::new("s0")
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s0", "y<3".parse().unwrap(), "b", "y", "s1"))
            .edge(Edge::new("s0", "y>0".parse().unwrap(), "c", "y", "s1"));
        let d = determinize(&m).unwrap();
        assert_eq!(names(&temporary_of(&d, "s0")), ["c[y>0]"]);
    }

    #[test]
    fn forbidden_cases() {
        let m = TimedModel::new("s0").action("a");
        let d = determinize(&m).unwrap();
        let deco = decorate(&d);
        assert_eq!(deco["s0"].forbidden, BTreeSet::from(["a".into()]));
        assert!(deco["s0"].permanent.is_empty() && deco["s0"].temporary.is_empty());
        let all = TimedModel::new("s0").edge(Edge::new("s0", Guard::always(), "a", "x", "s0"));
        assert!(forbidden_of(&determinize(&all).unwrap(), "s0").is_empty());
    }
}
