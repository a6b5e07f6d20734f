//! Seeded random models inside the determinizable class: every action has
//! one reset clock and one guard clock, so competing edges always agree on
//! both.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{AtomicConstraint, Clock, CmpOp, Edge, Guard, Location, TimedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthParams {
    pub locations: usize,
    pub clocks: usize,
    pub actions: usize,
    pub edges: usize,
    pub max_constant: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams { locations: 4, clocks: 2, actions: 2, edges: 5, max_constant: 3 }
    }
}

fn random_guard(rng: &mut ChaCha8Rng, clock: &Clock, c: u32) -> Guard {
    let mut atoms = Vec::new();
    let roll = rng.gen_range(0..6);
    if roll == 0 {
        return Guard::always();
    }
    if roll == 1 {
        return Guard::atom(clock.clone(), CmpOp::Eq, rng.gen_range(0..=c));
    }
    let lower = rng.gen_range(0..=c);
    if roll != 3 {
        let op = if rng.gen_bool(0.5) { CmpOp::Ge } else { CmpOp::Gt };
        atoms.push(AtomicConstraint::new(clock.clone(), op, lower));
    }
    if roll >= 3 {
        let upper = rng.gen_range(lower.max(1)..=c.max(1));
        let op = if rng.gen_bool(0.5) { CmpOp::Le } else { CmpOp::Lt };
        atoms.push(AtomicConstraint::new(clock.clone(), op, upper));
    }
    let g = Guard::new(atoms);
    if g.is_satisfiable() {
        g
    } else {
        Guard::atom(clock.clone(), CmpOp::Ge, lower)
    }
}

/// A model with locations `l0..`, clocks `x0..`, actions `a0..`; `l0` is
/// initial. Guards and durations only mention clocks that some edge resets.
pub fn random_model(p: &SynthParams, seed: u64) -> TimedModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clocks: Vec<Clock> = (0..p.clocks.max(1)).map(|i| Clock::from(format!("x{i}"))).collect();
    let n_actions = p.actions.max(1);
    let resets: Vec<Clock> = (0..n_actions).map(|_| clocks[rng.gen_range(0..clocks.len())].clone()).collect();
    let guard_clocks: Vec<Clock> = (0..n_actions).map(|_| clocks[rng.gen_range(0..clocks.len())].clone()).collect();
    let n = p.locations.max(1);

    let mut edges = Vec::new();
    for _ in 0..p.edges {
        let a = rng.gen_range(0..n_actions);
        let source = rng.gen_range(0..n);
        let target = rng.gen_range(0..n);
        let guard = random_guard(&mut rng, &guard_clocks[a], p.max_constant);
        edges.push(Edge::new(format!("l{source}"), guard, format!("a{a}"), resets[a].clone(), format!("l{target}")));
    }
    let reset: BTreeSet<Clock> = edges.iter().map(|e| e.reset.clone()).collect();
    for e in &mut edges {
        if e.guard.clocks().any(|c| !reset.contains(c)) {
            e.guard = Guard::always();
        }
    }

    let mut m = TimedModel::new("l0");
    for i in 0..n {
        let mut loc = Location::new(format!("l{i}"));
        loc.is_final = i > 0 && rng.gen_bool(0.25);
        if rng.gen_bool(0.25) {
            let c = &clocks[rng.gen_range(0..clocks.len())];
            if reset.contains(c) {
                loc.durations.push(Guard::atom(c.clone(), CmpOp::Ge, rng.gen_range(1..=p.max_constant.max(1))));
            }
        }
        m = m.location(loc);
    }
    for e in edges {
        m = m.edge(e);
    }
    for a in 0..n_actions {
        m = m.action(format!("a{a}"));
    }
    m
}
