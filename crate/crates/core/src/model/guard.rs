use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Clock, ModelError, Time, Valuation};

/// Comparison operator of an atomic clock constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// `clock op bound` with a natural bound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomicConstraint {
    pub clock: Clock,
    pub op: CmpOp,
    pub bound: u32,
}

impl AtomicConstraint {
    pub fn new(clock: impl Into<Clock>, op: CmpOp, bound: u32) -> Self {
        AtomicConstraint { clock: clock.into(), op, bound }
    }

    pub fn holds_at(&self, value: &Time) -> bool {
        self.op.holds(value, &Time::from_integer(i64::from(self.bound)))
    }
}

impl fmt::Display for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.clock, self.op.symbol(), self.bound)
    }
}

/// One end of an interval on the non-negative time line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bound {
    pub value: u32,
    pub strict: bool,
}

/// Set of values of one clock admitted by a guard. The lower end is always
/// present (`x >= 0` when unconstrained); `upper == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: Bound,
    pub upper: Option<Bound>,
}

impl Default for Interval {
    fn default() -> Self {
        Interval::FULL
    }
}

impl Interval {
    pub const FULL: Interval = Interval { lower: Bound { value: 0, strict: false }, upper: None };

    fn of_atom(op: CmpOp, bound: u32) -> Interval {
        let closed = |strict| Bound { value: bound, strict };
        match op {
            CmpOp::Lt => Interval { lower: Interval::FULL.lower, upper: Some(closed(true)) },
            CmpOp::Le => Interval { lower: Interval::FULL.lower, upper: Some(closed(false)) },
            CmpOp::Eq => Interval { lower: closed(false), upper: Some(closed(false)) },
            CmpOp::Ge => Interval { lower: closed(false), upper: None },
            CmpOp::Gt => Interval { lower: closed(true), upper: None },
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        // larger lower bound wins; on a tie the strict one is tighter
        let lower = match self.lower.value.cmp(&other.lower.value) {
            std::cmp::Ordering::Greater => self.lower,
            std::cmp::Ordering::Less => other.lower,
            std::cmp::Ordering::Equal => {
                Bound { value: self.lower.value, strict: self.lower.strict || other.lower.strict }
            }
        };
        let upper = match (self.upper, other.upper) {
            (None, u) | (u, None) => u,
            (Some(a), Some(b)) => Some(match a.value.cmp(&b.value) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => Bound { value: a.value, strict: a.strict || b.strict },
            }),
        };
        Interval { lower, upper }
    }

    pub fn is_empty(&self) -> bool {
        match self.upper {
            None => false,
            Some(u) => self.lower.value > u.value || (self.lower.value == u.value && (self.lower.strict || u.strict)),
        }
    }

    pub fn is_full(&self) -> bool {
        *self == Interval::FULL
    }

    pub fn contains(&self, value: &Time) -> bool {
        let lo = Time::from_integer(i64::from(self.lower.value));
        let above = if self.lower.strict { *value > lo } else { *value >= lo };
        let below = match self.upper {
            None => true,
            Some(u) => {
                let hi = Time::from_integer(i64::from(u.value));
                if u.strict {
                    *value < hi
                } else {
                    *value <= hi
                }
            }
        };
        above && below
    }

    /// `self ⊆ other`, assuming `self` is non-empty.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lower_ok = self.lower.value > other.lower.value
            || (self.lower.value == other.lower.value && (self.lower.strict || !other.lower.strict));
        let upper_ok = match (self.upper, other.upper) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.value < b.value || (a.value == b.value && (a.strict || !b.strict)),
        };
        lower_ok && upper_ok
    }

    /// Minimal atoms reproducing this interval for `clock`.
    pub fn atoms(&self, clock: &Clock) -> Vec<AtomicConstraint> {
        let mut out = Vec::new();
        if let Some(u) = self.upper {
            if !u.strict && !self.lower.strict && u.value == self.lower.value {
                out.push(AtomicConstraint::new(clock.clone(), CmpOp::Eq, u.value));
                return out;
            }
        }
        if self.lower != Interval::FULL.lower {
            let op = if self.lower.strict { CmpOp::Gt } else { CmpOp::Ge };
            out.push(AtomicConstraint::new(clock.clone(), op, self.lower.value));
        }
        if let Some(u) = self.upper {
            let op = if u.strict { CmpOp::Lt } else { CmpOp::Le };
            out.push(AtomicConstraint::new(clock.clone(), op, u.value));
        }
        out
    }
}

/// Conjunction of atomic constraints; the empty conjunction is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Guard {
    atoms: Vec<AtomicConstraint>,
}

impl Guard {
    pub fn new(atoms: Vec<AtomicConstraint>) -> Self {
        Guard { atoms }
    }

    pub fn always() -> Self {
        Guard::default()
    }

    pub fn atom(clock: impl Into<Clock>, op: CmpOp, bound: u32) -> Self {
        Guard::new(vec![AtomicConstraint::new(clock, op, bound)])
    }

    pub fn atoms(&self) -> &[AtomicConstraint] {
        &self.atoms
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(mut self, other: &Guard) -> Guard {
        self.atoms.extend(other.atoms.iter().cloned());
        self
    }

    /// Per-clock intervals (only constrained clocks appear).
    pub fn intervals(&self) -> BTreeMap<Clock, Interval> {
        let mut map: BTreeMap<Clock, Interval> = BTreeMap::new();
        for atom in &self.atoms {
            let iv = Interval::of_atom(atom.op, atom.bound);
            map.entry(atom.clock.clone()).and_modify(|cur| *cur = cur.intersect(&iv)).or_insert(iv);
        }
        map
    }

    pub fn from_intervals(intervals: &BTreeMap<Clock, Interval>) -> Guard {
        Guard::new(intervals.iter().flat_map(|(c, iv)| iv.atoms(c)).collect())
    }

    pub fn is_satisfiable(&self) -> bool {
        self.intervals().values().all(|iv| !iv.is_empty())
    }

    /// Canonical form: clocks in name order, at most one lower and one upper
    /// atom per clock, vacuous `x>=0` dropped. `None` when unsatisfiable.
    pub fn normalized(&self) -> Option<Guard> {
        let intervals = self.intervals();
        if intervals.values().any(Interval::is_empty) {
            return None;
        }
        Some(Guard::from_intervals(&intervals))
    }

    /// Normalized form, or the raw guard when it is unsatisfiable.
    pub fn canonical(&self) -> Guard {
        self.normalized().unwrap_or_else(|| self.clone())
    }

    pub fn clocks(&self) -> impl Iterator<Item = &Clock> {
        self.atoms.iter().map(|a| &a.clock)
    }

    pub fn satisfied_by(&self, v: &Valuation) -> Result<bool, ModelError> {
        for atom in &self.atoms {
            let value = v.get(atom.clock.as_str()).ok_or_else(|| ModelError::UnknownClock(atom.clock.to_string()))?;
            if !atom.holds_at(value) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every valuation satisfying `other` satisfies `self` (for satisfiable `other`).
    pub fn includes(&self, other: &Guard) -> bool {
        let theirs = other.intervals();
        self.intervals().iter().all(|(clock, mine)| {
            let t = theirs.get(clock).copied().unwrap_or(Interval::FULL);
            t.is_subset_of(mine)
        })
    }

    /// Largest constant per clock mentioned by this guard.
    pub fn max_constants(&self) -> BTreeMap<Clock, u32> {
        let mut out = BTreeMap::new();
        for atom in &self.atoms {
            let e = out.entry(atom.clock.clone()).or_insert(0);
            *e = (*e).max(atom.bound);
        }
        out
    }

    /// True when the guard carries a strictly positive lower bound on some clock.
    pub fn has_positive_lower_bound(&self) -> bool {
        self.atoms.iter().any(|a| match a.op {
            CmpOp::Ge | CmpOp::Eq => a.bound >= 1,
            CmpOp::Gt => true,
            CmpOp::Lt | CmpOp::Le => false,
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed guard {text:?}: {reason}")]
pub struct GuardSyntaxError {
    pub text: String,
    pub reason: String,
}

impl FromStr for AtomicConstraint {
    type Err = GuardSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GuardSyntaxError { text: s.to_string(), reason: reason.to_string() };
        let t = s.trim();
        let op_start = t.find(['<', '>', '=']).ok_or_else(|| err("missing comparison operator"))?;
        let (clock, rest) = t.split_at(op_start);
        let clock = clock.trim();
        if !super::is_token(clock) {
            return Err(err("clock name must be letters, digits or '_'"));
        }
        let (op, num) = if let Some(r) = rest.strip_prefix("<=") {
            (CmpOp::Le, r)
        } else if let Some(r) = rest.strip_prefix(">=") {
            (CmpOp::Ge, r)
        } else if let Some(r) = rest.strip_prefix('<') {
            (CmpOp::Lt, r)
        } else if let Some(r) = rest.strip_prefix('>') {
            (CmpOp::Gt, r)
        } else if let Some(r) = rest.strip_prefix('=') {
            (CmpOp::Eq, r)
        } else {
            return Err(err("unknown operator"));
        };
        let num = num.trim();
        if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("bound must be a natural number"));
        }
        let bound = num.parse::<u32>().map_err(|_| err("bound out of range"))?;
        Ok(AtomicConstraint::new(clock, op, bound))
    }
}

impl FromStr for Guard {
    type Err = GuardSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "true" {
            return Ok(Guard::always());
        }
        t.split('&').map(str::parse).collect::<Result<Vec<_>, _>>().map(Guard::new)
    }
}
