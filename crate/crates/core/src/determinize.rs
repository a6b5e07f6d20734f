//! Subset construction over locations, with the guards of competing
//! same-action edges split into disjoint cells.
//!
//! Supported class: for every reachable subset and action, the competing
//! edges either carry the same guard or constrain at most one common clock,
//! and they all reset the same clock. Anything else is rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::model::{
    validate_model, Action, Bound, Clock, Diagnostic, Edge, Guard, Interval, Location, Time, TimedModel,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeterminizeError {
    #[error("model has validation errors: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("unsupported nondeterminism at {subset} on action {action}: {reason}")]
    UnsupportedNondeterminism { subset: String, action: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetLocation {
    pub members: BTreeSet<String>,
    pub name: String,
    pub is_final: bool,
    pub durations: Vec<Guard>,
}

pub fn subset_name(members: &BTreeSet<String>) -> String {
    members.iter().map(String::as_str).collect::<Vec<_>>().join("+")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicModel {
    /// Model over subset locations (named by [`subset_name`]).
    pub model: TimedModel,
    /// Subsets in discovery order; `subsets[i]` backs `model.locations[i]`.
    pub subsets: Vec<SubsetLocation>,
    /// The model that was determinized.
    pub source: TimedModel,
}

impl DeterministicModel {
    pub fn subset(&self, name: &str) -> Option<&SubsetLocation> {
        self.subsets.iter().find(|s| s.name == name)
    }

    pub fn members(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.subset(name).map(|s| &s.members)
    }
}

pub fn determinize(m: &TimedModel) -> Result<DeterministicModel, DeterminizeError> {
    let errors: Vec<Diagnostic> = validate_model(m).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(DeterminizeError::Invalid(errors));
    }
    let mut by_source: HashMap<&str, Vec<&Edge>> = HashMap::new();
    for e in &m.edges {
        by_source.entry(e.source.as_str()).or_default().push(e);
    }

    let start: BTreeSet<String> = BTreeSet::from([m.initial.clone()]);
    let mut index: HashMap<BTreeSet<String>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![make_subset(m, start.clone())];
    let mut queue = VecDeque::from([start]);
    let mut edges = Vec::new();

    while let Some(members) = queue.pop_front() {
        let name = subset_name(&members);
        let mut per_action: BTreeMap<&Action, Vec<&Edge>> = BTreeMap::new();
        for member in &members {
            for e in by_source.get(member.as_str()).into_iter().flatten() {
                per_action.entry(&e.action).or_default().push(e);
            }
        }
        for (action, competing) in per_action {
            for (cell, reset, targets) in split_cells(&name, action, &competing)? {
                if !index.contains_key(&targets) {
                    index.insert(targets.clone(), subsets.len());
                    subsets.push(make_subset(m, targets.clone()));
                    queue.push_back(targets.clone());
                }
                edges.push(Edge {
                    source: name.clone(),
                    guard: cell,
                    action: action.clone(),
                    reset,
                    target: subset_name(&targets),
                });
            }
        }
    }

    let model = TimedModel {
        locations: subsets
            .iter()
            .map(|s| Location { name: s.name.clone(), durations: s.durations.clone(), is_final: s.is_final })
            .collect(),
        initial: subsets[0].name.clone(),
        clocks: m.clocks.clone(),
        edges,
        alphabet: m.alphabet.clone(),
    };
    Ok(DeterministicModel { model, subsets, source: m.clone() })
}

fn make_subset(m: &TimedModel, members: BTreeSet<String>) -> SubsetLocation {
    let mut durations: Vec<Guard> = Vec::new();
    let mut is_final = false;
    for name in &members {
        if let Some(loc) = m.find_location(name) {
            is_final |= loc.is_final;
            for g in &loc.durations {
                let g = g.canonical();
                if !durations.contains(&g) {
                    durations.push(g);
                }
            }
        }
    }
    SubsetLocation { name: subset_name(&members), members, is_final, durations }
}

type Cell = (Guard, Clock, BTreeSet<String>);

fn split_cells(subset: &str, action: &Action, competing: &[&Edge]) -> Result<Vec<Cell>, DeterminizeError> {
    let unsupported = |reason: String| DeterminizeError::UnsupportedNondeterminism {
        subset: subset.to_string(),
        action: action.to_string(),
        reason,
    };
    let resets: BTreeSet<&Clock> = competing.iter().map(|e| &e.reset).collect();
    if resets.len() > 1 {
        let list: Vec<&str> = resets.iter().map(|c| c.as_str()).collect();
        return Err(unsupported(format!("competing edges reset different clocks ({})", list.join(", "))));
    }
    let reset = competing[0].reset.clone();
    let guards: Vec<Guard> = competing.iter().map(|e| e.guard.canonical()).collect();

    if guards.iter().all(|g| *g == guards[0]) {
        let targets = competing.iter().map(|e| e.target.clone()).collect();
        return Ok(vec![(guards[0].clone(), reset, targets)]);
    }

    let constrained: BTreeSet<Clock> = guards.iter().flat_map(|g| g.clocks().cloned()).collect();
    if constrained.len() > 1 {
        let list: Vec<&str> = constrained.iter().map(Clock::as_str).collect();
        return Err(unsupported(format!("competing guards constrain several clocks ({})", list.join(", "))));
    }
    let clock = constrained.into_iter().next().expect("guards differ, so some clock is constrained");
    let intervals: Vec<Interval> =
        guards.iter().map(|g| g.intervals().get(&clock).copied().unwrap_or(Interval::FULL)).collect();

    let mut points: Vec<u32> = vec![0];
    for iv in &intervals {
        points.push(iv.lower.value);
        points.extend(iv.upper.map(|u| u.value));
    }
    points.sort_unstable();
    points.dedup();

    // elementary pieces: [p0], (p0,p1), [p1], ..., [pk], (pk, inf)
    let mut pieces: Vec<(Interval, BTreeSet<usize>)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let at = Interval { lower: Bound { value: p, strict: false }, upper: Some(Bound { value: p, strict: false }) };
        let next = points.get(i + 1).copied();
        let open =
            Interval { lower: Bound { value: p, strict: true }, upper: next.map(|n| Bound { value: n, strict: true }) };
        let sample_at = Time::from_integer(i64::from(p));
        let sample_open = match next {
            Some(n) => Time::new(i64::from(p) + i64::from(n), 2),
            None => Time::from_integer(i64::from(p) + 1),
        };
        for (piece, sample) in [(at, sample_at), (open, sample_open)] {
            let cover = intervals.iter().enumerate().filter(|(_, iv)| iv.contains(&sample)).map(|(k, _)| k).collect();
            pieces.push((piece, cover));
        }
    }

    // merge neighbouring pieces with the same covering edges
    let mut cells: Vec<(Interval, BTreeSet<usize>)> = Vec::new();
    for (piece, cover) in pieces {
        match cells.last_mut() {
            Some((iv, last)) if *last == cover => iv.upper = piece.upper,
            _ => cells.push((piece, cover)),
        }
    }

    Ok(cells
        .into_iter()
        .filter(|(_, cover)| !cover.is_empty())
        .map(|(iv, cover)| {
            let guard = Guard::new(iv.atoms(&clock));
            let targets = cover.iter().map(|&k| competing[k].target.clone()).collect();
            (guard, reset.clone(), targets)
        })
        .collect())
}
