use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Action, Guard, ModelError, Time, TimedModel, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub location: String,
    pub valuation: Valuation,
}

pub fn guard_satisfied(g: &Guard, v: &Valuation) -> Result<bool, ModelError> {
    g.satisfied_by(v)
}

/// Lets `d` time units pass; the location is unchanged.
pub fn step_delay(c: &Configuration, d: Time) -> Result<Configuration, ModelError> {
    if d < Time::zero() {
        return Err(ModelError::NegativeDelay(d));
    }
    Ok(Configuration { location: c.location.clone(), valuation: c.valuation.delayed(d) })
}

/// Successor configurations for action `a`, one per enabled edge (duplicates
/// collapsed, edge order kept). Empty iff `a` is refused at `c`.
pub fn step_action(m: &TimedModel, c: &Configuration, a: &Action) -> Result<Vec<Configuration>, ModelError> {
    if !m.alphabet.contains(a) {
        return Err(ModelError::UnknownAction(a.to_string()));
    }
    let mut out: Vec<Configuration> = Vec::new();
    for e in m.outgoing(&c.location).filter(|e| &e.action == a) {
        if !e.guard.satisfied_by(&c.valuation)? {
            continue;
        }
        let mut valuation = c.valuation.clone();
        valuation.set(e.reset.as_str(), Time::zero())?;
        let next = Configuration { location: e.target.clone(), valuation };
        if !out.contains(&next) {
            out.push(next);
        }
    }
    Ok(out)
}

/// Guards of the outgoing edges of `location`, grouped by action.
pub fn enabled_actions(m: &TimedModel, location: &str) -> Result<BTreeMap<Action, Vec<Guard>>, ModelError> {
    if m.find_location(location).is_none() {
        return Err(ModelError::UnknownLocation(location.to_string()));
    }
    let mut out: BTreeMap<Action, Vec<Guard>> = BTreeMap::new();
    for e in m.outgoing(location) {
        let guards = out.entry(e.action.clone()).or_default();
        if !guards.contains(&e.guard) {
            guards.push(e.guard.clone());
        }
    }
    Ok(out)
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

    fn at(loc: &str, x: Time, y: Time) -> Configuration {
        Configuration { location: loc.into(), valuation: [("x".into(), x), ("y".into(), y)].into_iter().collect() }
    }

    fn t(n: i64, d: i64) -> Time {
        Time::new(n, d)
    }

    #[test]
    fn delay_examples() {
        let c = at("s1", t(0, 1), t(0, 1));
        assert_eq!(step_delay(&c, t(2, 1)).unwrap(), at("s1", t(2, 1), t(2, 1)));
        let c = at("s1", t(1, 2), t(0, 1));
        assert_eq!(step_delay(&c, t(0, 1)).unwrap(), c);
        let c = at("s0", t(0, 1), t(1, 1));
        assert_eq!(step_delay(&c, t(1, 2)).unwrap(), at("s0", t(1, 2), t(3, 2)));
        assert!(matches!(step_delay(&c, t(-1, 2)), Err(ModelError::NegativeDelay(_))));
    }

    #[test]
    fn action_examples() {
        let m = fig1();
        let out = step_action(&m, &at("s1", t(2, 1), t(5, 1)), &"b".into()).unwrap();
        assert_eq!(out, vec![at("s2", t(2, 1), t(0, 1))]);
        assert!(step_action(&m, &at("s1", t(1, 1), t(1, 1)), &"b".into()).unwrap().is_empty());
        assert!(matches!(
            step_action(&m, &at("s1", t(1, 1), t(1, 1)), &"zz".into()),
            Err(ModelError::UnknownAction(_))
        ));
    }

    #[test]
    fn branching_action_yields_one_configuration_per_edge() {
        let m = TimedModel::new("s0").edge(Edge::new("s0", Guard::always(), "coin", "x", "s1")).edge(Edge::new(
            "s0",
            Guard::always(),
            "coin",
            "x",
            "s2",
        ));
        let out = step_action(&m, &m.initial_configuration(), &"coin".into()).unwrap();
        // oracle: direct scan of the edge list
        let expected: Vec<_> = m
            .edges
            .iter()
            .map(|e| Configuration { location: e.target.clone(), valuation: m.zero_valuation() })
            .collect();
        assert_eq!(out, expected);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn enabled_action_examples() {
        let m = fig1();
        let s1 = enabled_actions(&m, "s1").unwrap();
        assert_eq!(s1.len(), 1);
        assert_eq!(s1[&Action::from("b")], vec![Guard::atom("x", CmpOp::Ge, 2)]);
        assert!(enabled_actions(&m, "s2").unwrap().is_empty());

        let two = TimedModel::new("l")
            .edge(Edge::new("l", Guard::atom("x", CmpOp::Ge, 1), "a", "x", "m"))
            .edge(Edge::new("l", Guard::atom("x", CmpOp::Ge, 3), "a", "x", "n"));
        let got = enabled_actions(&two, "l").unwrap();
        assert_eq!(got[&Action::from("a")], vec![Guard::atom("x", CmpOp::Ge, 1), Guard::atom("x", CmpOp::Ge, 3)]);
        assert!(enabled_actions(&two, "nope").is_err());
    }
}
