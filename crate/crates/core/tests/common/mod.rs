//! Test oracles built from first principles: the textbook region
//! equivalence on concrete valuations, and an explicit-state enumerator of
//! the region automaton over grid valuations.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fs;
use std::path::PathBuf;

use num_traits::{One, Zero};
use trrg::determinize::DeterministicModel;
use trrg::dot::parse_model_text;
use trrg::graph::{TesterGraph, Witness};
use trrg::model::{Clock, Time, TimedModel, Valuation};
use trrg::region::MaxConstants;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Every reference-model fixture `(stem, text, model)`, sorted by name.
/// Files whose stem ends in `_one_way` are implementations, not specs.
pub fn fixtures() -> Vec<(String, String, TimedModel)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dot"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .filter_map(|p| {
            let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
            if stem.ends_with("_one_way") {
                return None;
            }
            let text = fs::read_to_string(&p).unwrap();
            let model = parse_model_text(&text).unwrap_or_else(|e| panic!("{stem}: {e}"));
            Some((stem, text, model))
        })
        .collect()
}

pub fn fixture(stem: &str) -> TimedModel {
    parse_model_text(&fs::read_to_string(fixture_dir().join(format!("{stem}.dot"))).unwrap()).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    /// Integer part and whether the fractional part is zero.
    At(i64, bool),
    Over,
}

/// Region signature: clipped integer parts, zero-fraction flags, and the
/// pairwise order of fractional parts among bounded clocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sig {
    pub parts: Vec<Part>,
    pub order: Vec<(usize, usize, Ordering)>,
}

fn frac(t: &Time) -> Time {
    t - t.floor()
}

pub fn sig(v: &[Time], c: &[u32]) -> Sig {
    let bounded: Vec<bool> = v.iter().zip(c).map(|(t, &k)| *t <= Time::from_integer(i64::from(k))).collect();
    let parts = v
        .iter()
        .zip(&bounded)
        .map(|(t, &b)| if b { Part::At(t.floor().to_integer(), frac(t).is_zero()) } else { Part::Over })
        .collect();
    let mut order = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if bounded[i] && bounded[j] {
                order.push((i, j, frac(&v[i]).cmp(&frac(&v[j]))));
            }
        }
    }
    Sig { parts, order }
}

/// Grid valuation with signature `s`: integers stay, fractional classes get
/// `j/(n+1)` in their order, unbounded clocks `c+1`.
pub fn grid_rep(s: &Sig, c: &[u32]) -> Vec<Time> {
    let n = s.parts.len();
    let fractional: Vec<usize> = (0..n).filter(|&i| matches!(s.parts[i], Part::At(_, false))).collect();
    let cmp = |i: usize, j: usize| -> Ordering {
        if i == j {
            return Ordering::Equal;
        }
        let (a, b, flip) = if i < j { (i, j, false) } else { (j, i, true) };
        let o = s.order.iter().find(|(x, y, _)| *x == a && *y == b).map(|t| t.2).unwrap();
        if flip {
            o.reverse()
        } else {
            o
        }
    };
    // rank = 1 + number of distinct classes strictly below
    let rank = |i: usize| -> i64 {
        let below: BTreeSet<usize> = fractional
            .iter()
            .copied()
            .filter(|&j| cmp(j, i) == Ordering::Less)
            .map(|j| fractional.iter().filter(|&&k| cmp(k, j) == Ordering::Less).count())
            .collect();
        1 + below.len() as i64
    };
    (0..n)
        .map(|i| match s.parts[i] {
            Part::At(k, true) => Time::from_integer(k),
            Part::At(k, false) => Time::from_integer(k) + Time::new(rank(i), n as i64 + 1),
            Part::Over => Time::from_integer(i64::from(c[i]) + 1),
        })
        .collect()
}

pub fn values(mc: &MaxConstants, v: &Valuation) -> Vec<Time> {
    mc.clocks().iter().map(|c| *v.get(c.as_str()).unwrap()).collect()
}

pub fn valuation(mc: &MaxConstants, v: &[Time]) -> Valuation {
    mc.clocks().iter().cloned().zip(v.iter().copied()).collect()
}

pub fn bounds(mc: &MaxConstants) -> Vec<u32> {
    (0..mc.len()).map(|i| mc.bound(i)).collect()
}

pub fn delayed(v: &[Time], d: Time) -> Vec<Time> {
    v.iter().map(|t| t + d).collect()
}

/// First signature different from `v`'s along time elapse, sampling at half
/// the smallest gap between the instants where some clock meets an integer.
pub fn oracle_successor(v: &[Time], c: &[u32]) -> Option<Sig> {
    let here = sig(v, c);
    let mut events: Vec<Time> = vec![Time::zero()];
    for (t, &k) in v.iter().zip(c) {
        let mut n = t.ceil();
        while n <= Time::from_integer(i64::from(k) + 1) {
            if n > *t {
                events.push(n - t);
            }
            n += Time::one();
        }
    }
    events.sort();
    events.dedup();
    if events.len() == 1 {
        return None;
    }
    let step = events.windows(2).map(|w| w[1] - w[0]).min().unwrap() / Time::from_integer(2);
    let last = *events.last().unwrap() + step;
    let mut d = step;
    while d <= last {
        let s = sig(&delayed(v, d), c);
        if s != here {
            return Some(s);
        }
        d += step;
    }
    None
}

pub type OracleState = (String, Sig);
pub type OracleEdge = (OracleState, String, Sig, OracleState);

/// Explicit enumeration of the region automaton of `d`: from the grid
/// representative of each state, every delay that is a multiple of
/// `1/(2(n+1))` up to the point where all clocks are unbounded, every edge
/// whose guard holds after the delay, reset, re-canonicalized.
pub fn brute_ara(d: &DeterministicModel) -> (BTreeSet<OracleState>, BTreeSet<OracleEdge>) {
    let m = &d.model;
    let mc = MaxConstants::of_model(m);
    let c = bounds(&mc);
    let n = mc.len();
    let clocks: Vec<Clock> = mc.clocks().to_vec();
    let delta = Time::new(1, 2 * (n as i64 + 1));
    let horizon = Time::from_integer(i64::from(c.iter().copied().max().unwrap_or(0)) + 2);

    let start: OracleState = (m.initial.clone(), sig(&vec![Time::zero(); n], &c));
    let mut states = BTreeSet::from([start.clone()]);
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some((loc, s)) = queue.pop_front() {
        let v = grid_rep(&s, &c);
        let mut witnesses: Vec<(Sig, Vec<Time>)> = Vec::new();
        let mut t = Time::zero();
        while t <= horizon {
            let w = delayed(&v, t);
            let ws = sig(&w, &c);
            if witnesses.last().map(|x| &x.0) != Some(&ws) {
                witnesses.push((ws, w));
            }
            t += delta;
        }
        for e in m.outgoing(&loc) {
            for (ws, w) in &witnesses {
                let named: Valuation = clocks.iter().cloned().zip(w.iter().copied()).collect();
                if !e.guard.satisfied_by(&named).unwrap() {
                    continue;
                }
                let mut after = w.clone();
                after[clocks.iter().position(|k| *k == e.reset).unwrap()] = Time::zero();
                let target: OracleState = (e.target.clone(), sig(&after, &c));
                edges.insert(((loc.clone(), s.clone()), e.action.to_string(), ws.clone(), target.clone()));
                if states.insert(target.clone()) {
                    queue.push_back(target);
                }
            }
        }
    }
    (states, edges)
}

/// The graph's states and edges in oracle terms, regions read through
/// their representatives. Fail edges are skipped.
pub fn graph_in_oracle_terms(g: &TesterGraph) -> (Vec<OracleState>, Vec<OracleEdge>) {
    let mc = g.clocks();
    let c = bounds(mc);
    let key = |s: usize| (g.state(s).base.clone(), sig(&values(mc, &mc.representative(&g.state(s).region)), &c));
    let states = (0..g.states().len()).filter(|&s| !g.is_fail(s)).map(key).collect();
    let edges = g
        .edges()
        .iter()
        .filter(|e| !g.is_fail(e.target))
        .map(|e| {
            let Witness::Region(w) = &e.witness else { panic!("catch-all on a normal edge") };
            (key(e.source), e.action.to_string(), sig(&values(mc, &mc.representative(w)), &c), key(e.target))
        })
        .collect();
    (states, edges)
}

/// Distinct signatures reachable from zero by grid delays and single resets.
pub fn brute_region_count(c: &[u32]) -> usize {
    let n = c.len();
    let delta = Time::new(1, 2 * (n as i64 + 1));
    let horizon = Time::from_integer(i64::from(c.iter().copied().max().unwrap_or(0)) + 2);
    let start = sig(&vec![Time::zero(); n], c);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let v = grid_rep(&s, c);
        let mut t = Time::zero();
        while t <= horizon {
            let w = delayed(&v, t);
            let mut next = vec![sig(&w, c)];
            for i in 0..n {
                let mut r = w.clone();
                r[i] = Time::zero();
                next.push(sig(&r, c));
            }
            for x in next {
                if seen.insert(x.clone()) {
                    queue.push_back(x);
                }
            }
            t += delta;
        }
    }
    seen.len()
}

pub fn count_by<K: std::hash::Hash + Eq, T>(items: &[T], key: impl Fn(&T) -> K) -> HashMap<K, usize> {
    let mut m = HashMap::new();
    for i in items {
        *m.entry(key(i)).or_insert(0) += 1;
    }
    m
}
