//! Durational-action timed automata: data model, validation and the timed
//! operational semantics over configurations `⟨location, valuation⟩`.

mod guard;
mod semantics;
mod validate;

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use guard::{AtomicConstraint, Bound, CmpOp, Guard, GuardSyntaxError, Interval};
pub use semantics::{enabled_actions, guard_satisfied, step_action, step_delay, Configuration};
pub use validate::{validate_model, Diagnostic, Severity};

/// Exact non-negative time value.
pub type Time = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("negative delay {0}")]
    NegativeDelay(Time),
    #[error("negative value for clock `{0}`")]
    NegativeValue(String),
}

/// Letters, digits and underscore, non-empty.
pub fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Location names additionally admit `+` (subset locations) and `.`/`-`.
pub fn is_location_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '.' | '-'))
}

macro_rules! name_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

name_type!(
    /// Observable action name.
    Action
);
name_type!(
    /// Clock name.
    Clock
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    /// Duration conditions of actions possibly still executing here.
    pub durations: Vec<Guard>,
    pub is_final: bool,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Location { name: name.into(), durations: Vec::new(), is_final: false }
    }

    pub fn final_(mut self) -> Self {
        self.is_final = true;
        self
    }

    pub fn with_duration(mut self, g: Guard) -> Self {
        self.durations.push(g);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub guard: Guard,
    pub action: Action,
    pub reset: Clock,
    pub target: String,
}

impl Edge {
    pub fn new(
        source: impl Into<String>,
        guard: Guard,
        action: impl Into<Action>,
        reset: impl Into<Clock>,
        target: impl Into<String>,
    ) -> Self {
        Edge { source: source.into(), guard, action: action.into(), reset: reset.into(), target: target.into() }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -[{}, {}, {}]-> {}", self.source, self.guard, self.action, self.reset, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedModel {
    pub locations: Vec<Location>,
    pub initial: String,
    pub clocks: BTreeSet<Clock>,
    pub edges: Vec<Edge>,
    pub alphabet: BTreeSet<Action>,
}

impl TimedModel {
    /// Model with a single initial location and nothing else.
    pub fn new(initial: impl Into<String>) -> Self {
        let initial = initial.into();
        TimedModel {
            locations: vec![Location::new(initial.clone())],
            initial,
            clocks: BTreeSet::new(),
            edges: Vec::new(),
            alphabet: BTreeSet::new(),
        }
    }

    /// Adds a location, replacing any location with the same name.
    pub fn location(mut self, loc: Location) -> Self {
        match self.locations.iter_mut().find(|l| l.name == loc.name) {
            Some(existing) => *existing = loc,
            None => self.locations.push(loc),
        }
        self
    }

    /// Adds an edge, declaring its endpoints, action, reset clock and guard clocks.
    pub fn edge(mut self, e: Edge) -> Self {
        for name in [&e.source, &e.target] {
            if self.find_location(name).is_none() {
                self.locations.push(Location::new(name.clone()));
            }
        }
        self.alphabet.insert(e.action.clone());
        self.clocks.insert(e.reset.clone());
        self.clocks.extend(e.guard.clocks().cloned());
        self.edges.push(e);
        self
    }

    pub fn action(mut self, a: impl Into<Action>) -> Self {
        self.alphabet.insert(a.into());
        self
    }

    pub fn clock(mut self, c: impl Into<Clock>) -> Self {
        self.clocks.insert(c.into());
        self
    }

    pub fn find_location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }

    pub fn outgoing<'a>(&'a self, location: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.source == location)
    }

    pub fn zero_valuation(&self) -> Valuation {
        Valuation::zero(self.clocks.iter().cloned())
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration { location: self.initial.clone(), valuation: self.zero_valuation() }
    }

    /// Copy with normalized guards, locations sorted by name and edges sorted
    /// by (source, action, target, guard text). Two models are isomorphic
    /// iff their canonical forms are equal.
    pub fn canonicalized(&self) -> TimedModel {
        let mut locations: Vec<Location> = self
            .locations
            .iter()
            .map(|l| Location {
                name: l.name.clone(),
                durations: l.durations.iter().map(Guard::canonical).collect(),
                is_final: l.is_final,
            })
            .collect();
        locations.sort_by(|a, b| a.name.cmp(&b.name));
        let mut edges: Vec<Edge> =
            self.edges.iter().map(|e| Edge { guard: e.guard.canonical(), ..e.clone() }).collect();
        edges.sort_by_cached_key(edge_sort_key);
        TimedModel {
            locations,
            initial: self.initial.clone(),
            clocks: self.clocks.clone(),
            edges,
            alphabet: self.alphabet.clone(),
        }
    }

    /// Largest constant compared against each clock in guards and durations
    /// (0 for clocks never compared).
    pub fn max_constants(&self) -> BTreeMap<Clock, u32> {
        let mut out: BTreeMap<Clock, u32> = self.clocks.iter().map(|c| (c.clone(), 0)).collect();
        let guards = self.edges.iter().map(|e| &e.guard).chain(self.locations.iter().flat_map(|l| l.durations.iter()));
        for g in guards {
            for (c, k) in g.max_constants() {
                let e = out.entry(c).or_insert(0);
                *e = (*e).max(k);
            }
        }
        out
    }
}

/// Emission order of edges: (source, action, target, guard text).
pub fn edge_sort_key(e: &Edge) -> (String, Action, String, String) {
    (e.source.clone(), e.action.clone(), e.target.clone(), e.guard.to_string())
}

/// Total mapping from clocks to non-negative rationals.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(BTreeMap<Clock, Time>);

impl Valuation {
    pub fn zero(clocks: impl IntoIterator<Item = Clock>) -> Self {
        Valuation(clocks.into_iter().map(|c| (c, Time::from_integer(0))).collect())
    }

    pub fn get(&self, clock: &str) -> Option<&Time> {
        self.0.get(clock)
    }

    pub fn set(&mut self, clock: &str, value: Time) -> Result<(), ModelError> {
        match self.0.get_mut(clock) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(ModelError::UnknownClock(clock.to_string())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Clock, &Time)> {
        self.0.iter()
    }

    pub fn clocks(&self) -> impl Iterator<Item = &Clock> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn delayed(&self, d: Time) -> Valuation {
        Valuation(self.0.iter().map(|(c, v)| (c.clone(), v + d)).collect())
    }
}

impl FromIterator<(Clock, Time)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (Clock, Time)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}={v}")?;
        }
        Ok(())
    }
}
