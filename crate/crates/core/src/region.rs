//! Alur-Dill clock regions over a fixed clock set with per-clock maximal
//! constants.
//!
//! A region is stored as one descriptor per clock (clocks indexed in name
//! order). Clocks with a non-zero fractional part carry a dense rank
//! `1..=k`; equal ranks mean equal fractional parts and a larger rank means a
//! larger fractional part, so the ranks encode the ordered partition of the
//! fractional clocks.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::model::{Clock, CmpOp, Guard, ModelError, Time, TimedModel, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClockPart {
    /// `x = k`, with `k <= c_x`.
    Int(u32),
    /// `k < x < k+1`, with `k < c_x`.
    Frac { floor: u32, rank: u32 },
    /// `x > c_x`.
    Over,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockRegion {
    parts: Vec<ClockPart>,
}

impl ClockRegion {
    pub fn parts(&self) -> &[ClockPart] {
        &self.parts
    }

    pub fn part(&self, clock: usize) -> ClockPart {
        self.parts[clock]
    }

    fn frac_count(&self) -> u32 {
        self.parts
            .iter()
            .filter_map(|p| match p {
                ClockPart::Frac { rank, .. } => Some(*rank),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Fractional clocks as an ordered partition, smallest fraction first.
    pub fn fractional_classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.frac_count() as usize];
        for (i, p) in self.parts.iter().enumerate() {
            if let ClockPart::Frac { rank, .. } = p {
                classes[*rank as usize - 1].push(i);
            }
        }
        classes
    }

    /// All clocks above their maximal constant: time elapse is absorbed here.
    pub fn is_unbounded(&self) -> bool {
        self.parts.iter().all(|p| *p == ClockPart::Over)
    }
}

/// A guard resolved against clock indices of a [`MaxConstants`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledGuard {
    atoms: Vec<(usize, CmpOp, u32)>,
}

/// Maximal constant per clock; the parameter of region equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaxConstants {
    clocks: Vec<Clock>,
    bounds: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad region string {text:?}: {reason}")]
pub struct RegionParseError {
    pub text: String,
    pub reason: String,
}

impl MaxConstants {
    pub fn new(bounds: BTreeMap<Clock, u32>) -> Self {
        let (clocks, bounds) = bounds.into_iter().unzip();
        MaxConstants { clocks, bounds }
    }

    pub fn of_model(m: &TimedModel) -> Self {
        MaxConstants::new(m.max_constants())
    }

    pub fn clocks(&self) -> &[Clock] {
        &self.clocks
    }

    pub fn len(&self) -> usize {
        self.clocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clocks.is_empty()
    }

    pub fn bound(&self, clock: usize) -> u32 {
        self.bounds[clock]
    }

    pub fn index_of(&self, clock: &str) -> Option<usize> {
        self.clocks.binary_search_by(|c| c.as_str().cmp(clock)).ok()
    }

    fn index(&self, clock: &str) -> Result<usize, ModelError> {
        self.index_of(clock).ok_or_else(|| ModelError::UnknownClock(clock.to_string()))
    }

    pub fn initial_region(&self) -> ClockRegion {
        ClockRegion { parts: vec![ClockPart::Int(0); self.clocks.len()] }
    }

    pub fn region_of(&self, v: &Valuation) -> Result<ClockRegion, ModelError> {
        let mut parts = Vec::with_capacity(self.clocks.len());
        let mut fracs: Vec<Time> = Vec::new();
        let mut pending: Vec<(usize, u32, Time)> = Vec::new();
        for (i, clock) in self.clocks.iter().enumerate() {
            let value = *v.get(clock.as_str()).ok_or_else(|| ModelError::UnknownClock(clock.to_string()))?;
            if value < Time::zero() {
                return Err(ModelError::NegativeValue(clock.to_string()));
            }
            let c = Time::from_integer(i64::from(self.bounds[i]));
            if value > c {
                parts.push(ClockPart::Over);
                continue;
            }
            let floor = value.floor();
            let frac = value - floor;
            let k = floor.to_integer().to_u32().expect("bounded by c_x");
            if frac.is_zero() {
                parts.push(ClockPart::Int(k));
            } else {
                parts.push(ClockPart::Frac { floor: k, rank: 0 });
                pending.push((i, k, frac));
                fracs.push(frac);
            }
        }
        fracs.sort();
        fracs.dedup();
        for (i, floor, frac) in pending {
            let rank = fracs.binary_search(&frac).expect("collected above") as u32 + 1;
            parts[i] = ClockPart::Frac { floor, rank };
        }
        Ok(ClockRegion { parts })
    }

    /// The next region entered as time elapses; `None` for the unbounded region.
    pub fn time_successor(&self, r: &ClockRegion) -> Option<ClockRegion> {
        let mut parts = r.parts.clone();
        let on_integer = parts.iter().any(|p| matches!(p, ClockPart::Int(_)));
        if on_integer {
            // integer clocks leave their point; those still below c_x get the
            // smallest fractional part
            let mut fresh = false;
            for (i, p) in parts.iter_mut().enumerate() {
                if let ClockPart::Int(k) = *p {
                    if k < self.bounds[i] {
                        *p = ClockPart::Frac { floor: k, rank: 0 };
                        fresh = true;
                    } else {
                        *p = ClockPart::Over;
                    }
                }
            }
            if fresh {
                for p in parts.iter_mut() {
                    if let ClockPart::Frac { rank, .. } = p {
                        *rank += 1;
                    }
                }
            }
            return Some(ClockRegion { parts });
        }
        let top = r.frac_count();
        if top == 0 {
            return None;
        }
        // the class with the largest fraction reaches the next integer
        for p in parts.iter_mut() {
            if let ClockPart::Frac { floor, rank } = *p {
                if rank == top {
                    *p = ClockPart::Int(floor + 1);
                }
            }
        }
        Some(ClockRegion { parts })
    }

    /// `r` followed by all its iterated time successors.
    pub fn succ_closure(&self, r: &ClockRegion) -> Vec<ClockRegion> {
        let mut out = vec![r.clone()];
        while let Some(next) = self.time_successor(out.last().expect("non-empty")) {
            out.push(next);
        }
        out
    }

    pub fn compile(&self, g: &Guard) -> Result<CompiledGuard, ModelError> {
        let atoms = g
            .atoms()
            .iter()
            .map(|a| Ok((self.index(a.clock.as_str())?, a.op, a.bound)))
            .collect::<Result<_, ModelError>>()?;
        Ok(CompiledGuard { atoms })
    }

    /// Every valuation of `r` satisfies `g`.
    pub fn region_entails(&self, r: &ClockRegion, g: &Guard) -> Result<bool, ModelError> {
        Ok(self.entails(r, &self.compile(g)?))
    }

    pub fn entails(&self, r: &ClockRegion, g: &CompiledGuard) -> bool {
        g.atoms.iter().all(|&(i, op, b)| match r.parts[i] {
            ClockPart::Int(k) => op.holds(&k, &b),
            ClockPart::Frac { floor, .. } => match op {
                CmpOp::Lt | CmpOp::Le => floor < b,
                CmpOp::Eq => false,
                CmpOp::Ge | CmpOp::Gt => floor >= b,
            },
            ClockPart::Over => match op {
                CmpOp::Lt | CmpOp::Le | CmpOp::Eq => false,
                CmpOp::Ge | CmpOp::Gt => b <= self.bounds[i],
            },
        })
    }

    pub fn region_reset(&self, r: &ClockRegion, clock: &str) -> Result<ClockRegion, ModelError> {
        Ok(self.reset_index(r, self.index(clock)?))
    }

    pub fn reset_index(&self, r: &ClockRegion, clock: usize) -> ClockRegion {
        let mut parts = r.parts.clone();
        let old = std::mem::replace(&mut parts[clock], ClockPart::Int(0));
        if let ClockPart::Frac { rank: gone, .. } = old {
            let shared = parts.iter().any(|p| matches!(p, ClockPart::Frac { rank, .. } if *rank == gone));
            if !shared {
                for p in parts.iter_mut() {
                    if let ClockPart::Frac { rank, .. } = p {
                        if *rank > gone {
                            *rank -= 1;
                        }
                    }
                }
            }
        }
        ClockRegion { parts }
    }

    /// Deterministic witness valuation: integers stay, a fractional clock of
    /// rank `j` among `k` ranks gets `floor + j/(k+1)`, overflow gets `c + 1/2`.
    pub fn representative(&self, r: &ClockRegion) -> Valuation {
        let k = i64::from(r.frac_count());
        self.clocks
            .iter()
            .zip(&r.parts)
            .zip(&self.bounds)
            .map(|((clock, part), &c)| {
                let v = match *part {
                    ClockPart::Int(n) => Time::from_integer(i64::from(n)),
                    ClockPart::Frac { floor, rank } => {
                        Time::from_integer(i64::from(floor)) + Time::new(i64::from(rank), k + 1)
                    }
                    ClockPart::Over => Time::from_integer(i64::from(c)) + Time::new(1, 2),
                };
                (clock.clone(), v)
            })
            .collect()
    }

    /// Canonical text: per clock `x=k`, `k<x<k+1` or `x>c`, then fractional
    /// order clauses; `true` for the empty region.
    pub fn render(&self, r: &ClockRegion) -> String {
        RegionDisplay { mc: self, region: r }.to_string()
    }

    pub fn display<'a>(&'a self, r: &'a ClockRegion) -> RegionDisplay<'a> {
        RegionDisplay { mc: self, region: r }
    }

    pub fn parse_region(&self, text: &str) -> Result<ClockRegion, RegionParseError> {
        let err = |reason: String| RegionParseError { text: text.to_string(), reason };
        let mut parts: Vec<Option<ClockPart>> = vec![None; self.clocks.len()];
        let mut equal: Vec<(usize, usize)> = Vec::new();
        let mut less: Vec<(usize, usize)> = Vec::new();
        let clauses: Vec<&str> =
            if text.trim() == "true" { Vec::new() } else { text.split(',').map(str::trim).collect() };
        let clock = |name: &str| self.index_of(name.trim()).ok_or_else(|| err(format!("unknown clock `{name}`")));
        let nat = |s: &str| s.trim().parse::<u32>().map_err(|_| err(format!("bad number `{s}`")));
        for clause in clauses {
            if let Some(rest) = clause.strip_prefix("frac(") {
                let (lhs, rest) = rest.split_once(')').ok_or_else(|| err(clause.into()))?;
                let (rel, rhs) = rest.split_at(1);
                let rhs =
                    rhs.strip_prefix("frac(").and_then(|s| s.strip_suffix(')')).ok_or_else(|| err(clause.into()))?;
                let pair = (clock(lhs)?, clock(rhs)?);
                match rel {
                    "<" => less.push(pair),
                    "=" => equal.push(pair),
                    _ => return Err(err(clause.into())),
                }
            } else if let Some((lo, rest)) = clause.split_once('<') {
                let (name, hi) = rest.split_once('<').ok_or_else(|| err(clause.into()))?;
                let (lo, hi) = (nat(lo)?, nat(hi)?);
                if hi != lo + 1 {
                    return Err(err(format!("`{clause}` is not a unit interval")));
                }
                parts[clock(name)?] = Some(ClockPart::Frac { floor: lo, rank: 0 });
            } else if let Some((name, c)) = clause.split_once('>') {
                let i = clock(name)?;
                if nat(c)? != self.bounds[i] {
                    return Err(err(format!("`{clause}` does not use the maximal constant")));
                }
                parts[i] = Some(ClockPart::Over);
            } else if let Some((name, k)) = clause.split_once('=') {
                parts[clock(name)?] = Some(ClockPart::Int(nat(k)?));
            } else {
                return Err(err(format!("unrecognised clause `{clause}`")));
            }
        }
        let mut parts: Vec<ClockPart> = parts
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| err(format!("missing clause for `{}`", self.clocks[i]))))
            .collect::<Result<_, _>>()?;
        // ranks: longest chain of strict relations below each clock
        let mut rank = vec![1u32; parts.len()];
        for _ in 0..parts.len().max(1) {
            for &(a, b) in &equal {
                let m = rank[a].max(rank[b]);
                rank[a] = m;
                rank[b] = m;
            }
            for &(a, b) in &less {
                rank[b] = rank[b].max(rank[a] + 1);
            }
        }
        for (i, p) in parts.iter_mut().enumerate() {
            if let ClockPart::Frac { rank: r, .. } = p {
                *r = rank[i];
            }
        }
        let region = ClockRegion { parts };
        if self.render(&region) != text.trim() {
            return Err(err("not in canonical form".into()));
        }
        Ok(region)
    }

    /// Number of distinct regions, by exhaustive exploration under time
    /// elapse and single-clock resets from the initial region.
    pub fn count_regions(&self) -> usize {
        let start = self.initial_region();
        let mut seen: HashSet<ClockRegion> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(r) = queue.pop_front() {
            let succ = self.time_successor(&r);
            let resets = (0..self.len()).map(|i| self.reset_index(&r, i));
            for next in succ.into_iter().chain(resets) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen.len()
    }

    /// Classical upper bound `|X|! · 2^|X| · Π (2c_x + 2)` (saturating).
    pub fn region_bound(&self) -> u128 {
        let n = self.clocks.len() as u128;
        let fact = (1..=n).fold(1u128, |acc, k| acc.saturating_mul(k));
        let pow = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
        self.bounds.iter().fold(fact.saturating_mul(pow), |acc, &c| acc.saturating_mul(2 * u128::from(c) + 2))
    }

    /// Delay from `v` after which the valuation lies in `target`, if `target`
    /// is a time successor of `v`'s region. Integer-point regions are hit
    /// exactly, open stretches at their midpoint, the final unbounded stretch
    /// half a unit after the last critical instant.
    pub fn delay_into(&self, v: &Valuation, target: &ClockRegion) -> Result<Option<Time>, ModelError> {
        let mut critical: Vec<Time> = vec![Time::zero()];
        for (i, clock) in self.clocks.iter().enumerate() {
            let value = *v.get(clock.as_str()).ok_or_else(|| ModelError::UnknownClock(clock.to_string()))?;
            let c = Time::from_integer(i64::from(self.bounds[i]));
            let mut k = value.ceil();
            while k <= c {
                critical.push(k - value);
                k += Time::from_integer(1);
            }
        }
        critical.sort();
        critical.dedup();
        let half = Time::new(1, 2);
        let mut candidates = Vec::with_capacity(critical.len() * 2);
        for (i, t) in critical.iter().enumerate() {
            candidates.push(*t);
            match critical.get(i + 1) {
                Some(next) => candidates.push((t + next) * half),
                None => candidates.push(t + half),
            }
        }
        for d in candidates {
            if &self.region_of(&v.delayed(d))? == target {
                return Ok(Some(d));
            }
        }
        Ok(None)
    }
}

pub struct RegionDisplay<'a> {
    mc: &'a MaxConstants,
    region: &'a ClockRegion,
}

impl fmt::Display for RegionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &self.mc.clocks;
        let mut clauses: Vec<String> = Vec::new();
        for (i, part) in self.region.parts.iter().enumerate() {
            clauses.push(match *part {
                ClockPart::Int(k) => format!("{}={k}", names[i]),
                ClockPart::Frac { floor, .. } => format!("{floor}<{}<{}", names[i], floor + 1),
                ClockPart::Over => format!("{}>{}", names[i], self.mc.bounds[i]),
            });
        }
        let classes = self.region.fractional_classes();
        for class in &classes {
            for pair in class.windows(2) {
                clauses.push(format!("frac({})=frac({})", names[pair[0]], names[pair[1]]));
            }
        }
        for pair in classes.windows(2) {
            clauses.push(format!("frac({})<frac({})", names[pair[0][0]], names[pair[1][0]]));
        }
        if clauses.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&clauses.join(", "))
    }
}

/// Least common multiple of the denominators of a valuation.
pub fn common_denominator(v: &Valuation) -> i64 {
    v.iter().fold(1i64, |acc, (_, t)| acc.lcm(t.denom()))
}
