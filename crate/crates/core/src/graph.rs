//! Symbolic graphs shared by the refusal region graph and the canonical
//! tester: localities are (subset location, region) pairs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Action, Clock};
use crate::refusal::RefusalSet;
use crate::region::{ClockRegion, MaxConstants};

pub type StateId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Incon,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Incon => "incon",
            Verdict::Fail => "fail",
        })
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "incon" => Ok(Verdict::Incon),
            "fail" => Ok(Verdict::Fail),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicState {
    pub base: String,
    pub region: ClockRegion,
    pub refusals: RefusalSet,
    pub is_final: bool,
    pub is_initial: bool,
}

/// Region in which an edge fires. `Any` is the catch-all used for actions
/// that are forbidden at every instant of a locality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    Region(ClockRegion),
    Any,
}

impl Witness {
    pub fn matches(&self, r: &ClockRegion) -> bool {
        match self {
            Witness::Region(w) => w == r,
            Witness::Any => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicEdge {
    pub source: StateId,
    pub action: Action,
    pub witness: Witness,
    /// Clock reset by the originating model edge; `None` on edges into the fail sink.
    pub reset: Option<Clock>,
    pub target: StateId,
}

/// A refusal region graph, or a canonical tester when it carries a fail
/// sink and verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TesterGraph {
    clocks: MaxConstants,
    alphabet: BTreeSet<Action>,
    states: Vec<SymbolicState>,
    initial: StateId,
    edges: Vec<SymbolicEdge>,
    fail_sink: Option<StateId>,
    verdicts: Option<Vec<Verdict>>,
    out: Vec<Vec<EdgeId>>,
}

impl TesterGraph {
    pub fn new(
        clocks: MaxConstants,
        alphabet: BTreeSet<Action>,
        states: Vec<SymbolicState>,
        initial: StateId,
        edges: Vec<SymbolicEdge>,
    ) -> Self {
        let mut g =
            TesterGraph { clocks, alphabet, states, initial, edges, fail_sink: None, verdicts: None, out: Vec::new() };
        g.reindex();
        g
    }

    pub(crate) fn into_tester(mut self, fail_sink: StateId, verdicts: Vec<Verdict>) -> Self {
        self.fail_sink = Some(fail_sink);
        self.verdicts = Some(verdicts);
        self.reindex();
        self
    }

    pub(crate) fn push_state(&mut self, s: SymbolicState) -> StateId {
        self.states.push(s);
        self.out.push(Vec::new());
        self.states.len() - 1
    }

    fn reindex(&mut self) {
        self.out = vec![Vec::new(); self.states.len()];
        for (i, e) in self.edges.iter().enumerate() {
            self.out[e.source].push(i);
        }
    }

    pub fn clocks(&self) -> &MaxConstants {
        &self.clocks
    }

    pub fn alphabet(&self) -> &BTreeSet<Action> {
        &self.alphabet
    }

    pub fn states(&self) -> &[SymbolicState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &SymbolicState {
        &self.states[id]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn edges(&self) -> &[SymbolicEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &SymbolicEdge {
        &self.edges[id]
    }

    pub fn fail_sink(&self) -> Option<StateId> {
        self.fail_sink
    }

    pub fn is_tester(&self) -> bool {
        self.verdicts.is_some()
    }

    pub fn is_fail(&self, s: StateId) -> bool {
        self.fail_sink == Some(s)
    }

    pub fn verdict(&self, s: StateId) -> Option<Verdict> {
        self.verdicts.as_ref().map(|v| v[s])
    }

    pub fn verdicts(&self) -> Option<&[Verdict]> {
        self.verdicts.as_deref()
    }

    pub fn outgoing(&self, s: StateId) -> &[EdgeId] {
        &self.out[s]
    }

    /// The edge of `s` labelled `action` that fires in region `r`, if any.
    pub fn edge_for(&self, s: StateId, action: &Action, r: &ClockRegion) -> Option<EdgeId> {
        self.out[s].iter().copied().find(|&i| self.edges[i].action == *action && self.edges[i].witness.matches(r))
    }

    pub fn add_edge(&mut self, e: SymbolicEdge) -> EdgeId {
        self.out[e.source].push(self.edges.len());
        self.edges.push(e);
        self.edges.len() - 1
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> SymbolicEdge {
        let e = self.edges.remove(id);
        self.reindex();
        e
    }

    /// Canonical region text of a locality (empty for the fail sink).
    pub fn region_text(&self, s: StateId) -> String {
        if self.is_fail(s) {
            String::new()
        } else {
            self.clocks.render(&self.states[s].region)
        }
    }

    pub fn witness_text(&self, w: &Witness) -> String {
        match w {
            Witness::Region(r) => self.clocks.render(r),
            Witness::Any => "*".to_string(),
        }
    }

    /// Human-readable locality name `base | region`.
    pub fn state_label(&self, s: StateId) -> String {
        if self.is_fail(s) {
            return "fail".to_string();
        }
        format!("{} | {}", self.states[s].base, self.region_text(s))
    }
}
