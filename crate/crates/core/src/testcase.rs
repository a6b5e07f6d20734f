//! Test cases: paths through the canonical tester, concretized into timed
//! (delay, action) sequences.
//!
//! Text format, one block per case, blocks separated by a blank line:
//!
//! ```text
//! case 0 expect=pass
//! step delay=0/1 action=a
//! step delay=2/1 action=b
//! ```

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::determinize::DeterministicModel;
use crate::graph::{EdgeId, StateId, SymbolicEdge, TesterGraph, Verdict, Witness};
use crate::model::{step_action, step_delay, Action, Time};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractTestCase {
    pub path: Vec<SymbolicEdge>,
    pub terminal_verdict: Verdict,
}

impl AbstractTestCase {
    pub fn actions(&self) -> Vec<&str> {
        self.path.iter().map(|e| e.action.as_str()).collect()
    }

    pub fn is_probe(&self) -> bool {
        self.terminal_verdict == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub delay: Time,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedTestCase {
    pub id: String,
    pub steps: Vec<Step>,
    pub expected: Verdict,
}

impl TimedTestCase {
    pub fn is_probe(&self) -> bool {
        self.expected == Verdict::Fail
    }
}

/// How a suite is drawn from the tester.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Every path up to the depth bound.
    AllPaths,
    /// One case per not yet covered edge.
    EdgeCover,
}

fn stops_at(t: &TesterGraph, s: StateId) -> bool {
    t.state(s).is_final || t.verdict(s) == Some(Verdict::Incon)
}

fn to_case(t: &TesterGraph, path: &[EdgeId]) -> AbstractTestCase {
    let end = path.last().map_or(t.initial(), |&e| t.edge(e).target);
    AbstractTestCase {
        path: path.iter().map(|&e| t.edge(e).clone()).collect(),
        terminal_verdict: t.verdict(end).unwrap_or(Verdict::Pass),
    }
}

/// Paths of at most `depth` edges from the initial locality that never reuse
/// an edge, ending at a final or incon locality, at the depth bound, or where
/// no unused edge remains. With `include_fail_probes`, every prefix is also
/// extended by each of its fail edges.
pub fn extract_cases(t: &TesterGraph, depth: usize, include_fail_probes: bool) -> Vec<AbstractTestCase> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    let mut used = vec![false; t.edges().len()];
    let mut path = Vec::new();
    walk(t, t.initial(), depth, include_fail_probes, &mut used, &mut path, &mut out);
    out
}

fn walk(
    t: &TesterGraph,
    s: StateId,
    depth: usize,
    probes: bool,
    used: &mut [bool],
    path: &mut Vec<EdgeId>,
    out: &mut Vec<AbstractTestCase>,
) {
    if probes && path.len() < depth {
        for &e in t.outgoing(s) {
            if t.is_fail(t.edge(e).target) {
                path.push(e);
                out.push(to_case(t, path));
                path.pop();
            }
        }
    }
    let next: Vec<EdgeId> =
        t.outgoing(s).iter().copied().filter(|&e| !used[e] && !t.is_fail(t.edge(e).target)).collect();
    if stops_at(t, s) || path.len() == depth || next.is_empty() {
        out.push(to_case(t, path));
        return;
    }
    for e in next {
        used[e] = true;
        path.push(e);
        walk(t, t.edge(e).target, depth, probes, used, path, out);
        path.pop();
        used[e] = false;
    }
}

/// A suite covering every edge reachable within `depth`: for each uncovered
/// edge, a shortest prefix to its source, the edge itself, and (unless it
/// enters fail) a greedy extension preferring uncovered edges.
pub fn covering_suite(t: &TesterGraph, depth: usize, include_fail_probes: bool) -> Vec<AbstractTestCase> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    let n = t.states().len();
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[t.initial()] = true;
    let mut queue = VecDeque::from([t.initial()]);
    while let Some(s) = queue.pop_front() {
        for &e in t.outgoing(s) {
            let target = t.edge(e).target;
            if !t.is_fail(target) && !seen[target] {
                seen[target] = true;
                parent[target] = Some(e);
                queue.push_back(target);
            }
        }
    }
    let prefix = |mut s: StateId| {
        let mut p = Vec::new();
        while let Some(e) = parent[s] {
            p.push(e);
            s = t.edge(e).source;
        }
        p.reverse();
        p
    };

    let mut covered = vec![false; t.edges().len()];
    if t.edges().is_empty() || t.outgoing(t.initial()).is_empty() {
        out.push(to_case(t, &[]));
    }
    for e in 0..t.edges().len() {
        let edge = t.edge(e);
        let to_fail = t.is_fail(edge.target);
        if covered[e] || !seen[edge.source] || (to_fail && !include_fail_probes) {
            continue;
        }
        let mut path = prefix(edge.source);
        if path.len() >= depth {
            continue;
        }
        path.push(e);
        if !to_fail {
            let mut s = edge.target;
            while path.len() < depth && !stops_at(t, s) {
                let candidates: Vec<EdgeId> = t
                    .outgoing(s)
                    .iter()
                    .copied()
                    .filter(|&f| !t.is_fail(t.edge(f).target) && !path.contains(&f))
                    .collect();
                let Some(&f) = candidates.iter().find(|&&f| !covered[f]).or(candidates.first()) else {
                    break;
                };
                path.push(f);
                s = t.edge(f).target;
            }
        }
        for &f in &path {
            covered[f] = true;
        }
        out.push(to_case(t, &path));
    }
    out
}

pub fn select_cases(t: &TesterGraph, strategy: Strategy, depth: usize, probes: bool) -> Vec<AbstractTestCase> {
    match strategy {
        Strategy::AllPaths => extract_cases(t, depth, probes),
        Strategy::EdgeCover => covering_suite(t, depth, probes),
    }
}

/// Chooses firing instants along the path: each step waits until the
/// current valuation enters the edge's witness region (integer points
/// exactly, open stretches at their midpoint); catch-all edges fire at once.
pub fn concretize(t: &TesterGraph, c: &AbstractTestCase, id: impl Into<String>) -> TimedTestCase {
    let mc = t.clocks();
    let mut v = crate::model::Valuation::zero(mc.clocks().iter().cloned());
    let mut steps = Vec::with_capacity(c.path.len());
    for e in &c.path {
        let delay = match &e.witness {
            Witness::Any => Time::zero(),
            Witness::Region(r) => mc
                .delay_into(&v, r)
                .expect("valuation over the graph clocks")
                .expect("witness is a time successor of the source region"),
        };
        v = v.delayed(delay);
        if let Some(x) = &e.reset {
            v.set(x.as_str(), Time::zero()).expect("reset clock is a graph clock");
        }
        steps.push(Step { delay, action: e.action.clone() });
    }
    TimedTestCase { id: id.into(), steps, expected: c.terminal_verdict }
}

pub fn concretize_all(t: &TesterGraph, cases: &[AbstractTestCase]) -> Vec<TimedTestCase> {
    cases.iter().enumerate().map(|(i, c)| concretize(t, c, i.to_string())).collect()
}

/// Replays a timed case on the determinized model next to its abstract path:
/// the model must fire each normal step into the path's base location, the
/// clock region at each firing must be the witness, fail steps must be
/// refused, and the reached locality must carry the expected verdict.
pub fn replay_check(
    d: &DeterministicModel,
    t: &TesterGraph,
    c: &AbstractTestCase,
    tc: &TimedTestCase,
) -> Result<(), String> {
    if c.path.len() != tc.steps.len() {
        return Err("path and steps differ in length".into());
    }
    let mc = t.clocks();
    let mut config = d.model.initial_configuration();
    let mut state = t.initial();
    for (i, (e, step)) in c.path.iter().zip(&tc.steps).enumerate() {
        if e.source != state || e.action != step.action {
            return Err(format!("step {i}: does not follow the path"));
        }
        config = step_delay(&config, step.delay).map_err(|err| format!("step {i}: {err}"))?;
        let region = mc.region_of(&config.valuation).map_err(|err| format!("step {i}: {err}"))?;
        if !e.witness.matches(&region) {
            return Err(format!("step {i}: fired in {} instead of {}", mc.render(&region), t.witness_text(&e.witness)));
        }
        let next = step_action(&d.model, &config, &step.action).map_err(|err| format!("step {i}: {err}"))?;
        if t.is_fail(e.target) {
            if !next.is_empty() {
                return Err(format!("step {i}: the model accepts {} where the tester fails", step.action));
            }
        } else {
            let [only] = next.as_slice() else {
                return Err(format!("step {i}: {} successors", next.len()));
            };
            let target = t.state(e.target);
            let reached = mc.region_of(&only.valuation).map_err(|err| format!("step {i}: {err}"))?;
            if only.location != target.base || reached != target.region {
                return Err(format!("step {i}: reached {} instead of {}", only.location, t.state_label(e.target)));
            }
            config = only.clone();
        }
        state = e.target;
    }
    match t.verdict(state) {
        Some(v) if v == tc.expected => Ok(()),
        other => Err(format!("reached verdict {other:?}, expected {}", tc.expected)),
    }
}

pub fn format_time(t: &Time) -> String {
    format!("{}/{}", t.numer(), t.denom())
}

impl fmt::Display for TimedTestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {} expect={}", self.id, self.expected)?;
        for s in &self.steps {
            writeln!(f, "step delay={} action={}", format_time(&s.delay), s.action)?;
        }
        Ok(())
    }
}

pub fn format_cases(cases: &[TimedTestCase]) -> String {
    cases.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CaseFormatError {
    pub line: usize,
    pub message: String,
}

fn parse_time(text: &str) -> Option<Time> {
    let (p, q) = text.split_once('/')?;
    let p: i64 = p.parse().ok()?;
    let q: i64 = q.parse().ok()?;
    (q >= 1 && p >= 0).then(|| Time::new(p, q))
}

pub fn parse_cases(text: &str) -> Result<Vec<TimedTestCase>, CaseFormatError> {
    let mut cases: Vec<TimedTestCase> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: &str| CaseFormatError { line: i + 1, message: message.to_string() };
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["case", id, expect] => {
                let v = expect
                    .strip_prefix("expect=")
                    .and_then(|v| Verdict::from_str(v).ok())
                    .ok_or_else(|| err("expected expect=<pass|incon|fail>"))?;
                cases.push(TimedTestCase { id: id.to_string(), steps: Vec::new(), expected: v });
            }
            ["step", delay, action] => {
                let current = cases.last_mut().ok_or_else(|| err("step before any case header"))?;
                let delay = delay
                    .strip_prefix("delay=")
                    .and_then(parse_time)
                    .ok_or_else(|| err("expected delay=<p>/<q> with p >= 0, q >= 1"))?;
                let action = action
                    .strip_prefix("action=")
                    .filter(|a| crate::model::is_token(a))
                    .ok_or_else(|| err("expected action=<name>"))?;
                current.steps.push(Step { delay, action: Action::from(action) });
            }
            _ => return Err(err("expected a case header or a step line")),
        }
    }
    Ok(cases)
}
