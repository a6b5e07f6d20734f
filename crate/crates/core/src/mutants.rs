//! Single-edit mutants of a model, used to exercise the tester's power to
//! detect disagreeing implementations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::determinize::determinize;
use crate::dot::emit_model;
use crate::model::{validate_model, AtomicConstraint, Clock, CmpOp, Edge, Guard, TimedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutationKind {
    AddEdge,
    DeleteEdge,
    WidenGuard,
    NarrowGuard,
    RetargetEdge,
}

impl MutationKind {
    pub const ALL: [MutationKind; 5] = [
        MutationKind::AddEdge,
        MutationKind::DeleteEdge,
        MutationKind::WidenGuard,
        MutationKind::NarrowGuard,
        MutationKind::RetargetEdge,
    ];
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationKind::AddEdge => "add-edge",
            MutationKind::DeleteEdge => "delete-edge",
            MutationKind::WidenGuard => "widen-guard",
            MutationKind::NarrowGuard => "narrow-guard",
            MutationKind::RetargetEdge => "retarget-edge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutant {
    /// The mutated model.
    pub model: TimedModel,
    pub kind: MutationKind,
    pub description: String,
}

fn replace_guard(m: &TimedModel, i: usize, g: Guard) -> TimedModel {
    let mut out = m.clone();
    out.edges[i].guard = g;
    out
}

fn shift(atom: &AtomicConstraint, tighten: bool) -> Option<AtomicConstraint> {
    let up = |b: u32| Some(b + 1);
    let down = |b: u32| b.checked_sub(1);
    let bound = match (atom.op, tighten) {
        (CmpOp::Ge | CmpOp::Gt, true) | (CmpOp::Lt | CmpOp::Le, false) => up(atom.bound)?,
        (CmpOp::Ge | CmpOp::Gt, false) | (CmpOp::Lt | CmpOp::Le, true) => down(atom.bound)?,
        (CmpOp::Eq, _) => return None,
    };
    Some(AtomicConstraint { bound, ..atom.clone() })
}

/// Clock a new guard may constrain on edge `i` without leaving the
/// determinizable class: one already constrained by a same-action edge,
/// else the edge's own reset clock.
fn guard_clock(m: &TimedModel, i: usize) -> Clock {
    let e = &m.edges[i];
    m.edges
        .iter()
        .filter(|o| o.action == e.action)
        .flat_map(|o| o.guard.clocks())
        .next()
        .cloned()
        .unwrap_or_else(|| e.reset.clone())
}

fn narrowings(m: &TimedModel, i: usize) -> Vec<(Guard, String)> {
    let g = &m.edges[i].guard;
    if g.is_true() {
        let c = guard_clock(m, i);
        return vec![(Guard::atom(c.clone(), CmpOp::Ge, 1), format!("{c}>=1"))];
    }
    let mut out = Vec::new();
    for (k, atom) in g.atoms().iter().enumerate() {
        if let Some(new) = shift(atom, true) {
            let mut atoms = g.atoms().to_vec();
            atoms[k] = new.clone();
            out.push((Guard::new(atoms), format!("{atom} -> {new}")));
        }
    }
    out
}

fn widenings(m: &TimedModel, i: usize) -> Vec<(Guard, String)> {
    let g = &m.edges[i].guard;
    let mut out = Vec::new();
    for (k, atom) in g.atoms().iter().enumerate() {
        let mut atoms = g.atoms().to_vec();
        let text = match atom.op {
            CmpOp::Eq => {
                let new = AtomicConstraint { op: CmpOp::Le, ..atom.clone() };
                let text = format!("{atom} -> {new}");
                atoms[k] = new;
                text
            }
            _ => match shift(atom, false) {
                Some(new) if !(new.bound == 0 && new.op == CmpOp::Ge) => {
                    let text = format!("{atom} -> {new}");
                    atoms[k] = new;
                    text
                }
                _ if matches!(atom.op, CmpOp::Ge | CmpOp::Gt) => {
                    atoms.remove(k);
                    format!("{atom} dropped")
                }
                _ => continue,
            },
        };
        out.push((Guard::new(atoms), text));
    }
    out
}

fn reset_for(m: &TimedModel, action: &crate::model::Action) -> Clock {
    m.edges
        .iter()
        .find(|e| &e.action == action)
        .map(|e| e.reset.clone())
        .or_else(|| m.clocks.iter().next().cloned())
        .unwrap_or_else(|| Clock::from("x"))
}

/// Every single-edit mutant of the requested kinds, in a fixed order.
/// Mutants that fail validation, equal the base model, leave the
/// determinizable class, or duplicate an earlier mutant are dropped.
pub fn enumerate_mutants(m: &TimedModel, kinds: &[MutationKind]) -> Vec<Mutant> {
    let mut raw: Vec<(TimedModel, MutationKind, String)> = Vec::new();
    let names: Vec<String> = m.locations.iter().map(|l| l.name.clone()).collect();
    for &kind in kinds {
        match kind {
            MutationKind::AddEdge => {
                for l in &names {
                    let offered: BTreeSet<_> = m.outgoing(l).map(|e| e.action.clone()).collect();
                    for a in m.alphabet.iter().filter(|a| !offered.contains(*a)) {
                        let e = Edge::new(l.clone(), Guard::always(), a.clone(), reset_for(m, a), l.clone());
                        let desc = format!("add {e}");
                        raw.push((m.clone().edge(e), kind, desc));
                    }
                }
            }
            MutationKind::DeleteEdge => {
                for (i, e) in m.edges.iter().enumerate() {
                    let mut out = m.clone();
                    out.edges.remove(i);
                    raw.push((out, kind, format!("delete {e}")));
                }
            }
            MutationKind::NarrowGuard | MutationKind::WidenGuard => {
                for (i, e) in m.edges.iter().enumerate() {
                    let options = if kind == MutationKind::NarrowGuard { narrowings(m, i) } else { widenings(m, i) };
                    for (g, text) in options {
                        raw.push((replace_guard(m, i, g), kind, format!("{kind} {e}: {text}")));
                    }
                }
            }
            MutationKind::RetargetEdge => {
                for (i, e) in m.edges.iter().enumerate() {
                    for t in names.iter().filter(|t| **t != e.target) {
                        let mut out = m.clone();
                        out.edges[i].target = t.clone();
                        raw.push((out, kind, format!("retarget {e} to {t}")));
                    }
                }
            }
        }
    }

    let mut seen: HashSet<String> = HashSet::from([emit_model(m).to_string()]);
    raw.into_iter()
        .filter(|(model, _, _)| {
            validate_model(model).iter().all(|d| !d.is_error())
                && determinize(model).is_ok()
                && seen.insert(emit_model(model).to_string())
        })
        .map(|(model, kind, description)| Mutant { model, kind, description })
        .collect()
}

/// `count` distinct mutants drawn with a generator seeded by `seed`.
pub fn generate_mutants(m: &TimedModel, seed: u64, count: usize) -> Vec<Mutant> {
    if count == 0 {
        return Vec::new();
    }
    let mut all = enumerate_mutants(m, &MutationKind::ALL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all.shuffle(&mut rng);
    all.truncate(count);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Location;

    fn fig1() -> TimedModel {
        TimedModel::new("s0")
            .location(Location::new("s1").with_duration(Guard::atom("x", CmpOp::Ge, 2)))
            .location(Location::new("s2").final_())
            .edge(Edge::new("s0", Guard::always(), "a", "x", "s1"))
            .edge(Edge::new("s1", Guard::atom("x", CmpOp::Ge, 2), "b", "y", "s2"))
    }

    #[test]
    fn seeded_generation_is_deterministic_and_distinct() {
        assert!(generate_mutants(&fig1(), 1, 0).is_empty());
        let a = generate_mutants(&fig1(), 1, 5);
        let b = generate_mutants(&fig1(), 1, 5);
        assert_eq!(a.len(), 5);
        assert_eq!(a, b);
        let texts: HashSet<String> = a.iter().map(|m| emit_model(&m.model).to_string()).collect();
        assert_eq!(texts.len(), 5);
        assert!(!texts.contains(&emit_model(&fig1()).to_string()));
    }

    #[test]
    fn delete_only_edge() {
        let m = TimedModel::new("s0").edge(Edge::new("s0", Guard::always(), "a", "x", "s1"));
        let muts = enumerate_mutants(&m, &[MutationKind::DeleteEdge]);
        assert_eq!(muts.len(), 1);
        assert!(muts[0].model.edges.is_empty());
        assert_eq!(muts[0].model.alphabet, m.alphabet);
    }

    #[test]
    fn guard_edits() {
        let narrow = enumerate_mutants(&fig1(), &[MutationKind::NarrowGuard]);
        let guards: Vec<String> = narrow.iter().map(|m| m.model.edges[0].guard.to_string()).collect();
        assert!(guards.contains(&"x>=1".to_string()));
        assert!(narrow.iter().any(|m| m.model.edges[1].guard.to_string() == "x>=3"));
        let widen = enumerate_mutants(&fig1(), &[MutationKind::WidenGuard]);
        assert_eq!(widen.len(), 1);
        assert_eq!(widen[0].model.edges[1].guard.to_string(), "x>=1");
    }

    #[test]
    fn add_edge_uses_unoffered_actions() {
        let muts = enumerate_mutants(&fig1(), &[MutationKind::AddEdge]);
        // s0 lacks b, s1 lacks a, s2 lacks both
        assert_eq!(muts.len(), 4);
        assert!(muts.iter().all(|m| m.model.edges.len() == 3));
    }
}
