//! Runs timed test cases against an implementation model, reading the
//! canonical tester alongside to classify each observation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{StateId, TesterGraph, Verdict};
use crate::model::{step_action, step_delay, Configuration, Time, TimedModel, Valuation};
use crate::testcase::{format_time, TimedTestCase};

/// How a nondeterministic implementation picks among its successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoicePolicy {
    /// The first successor in edge order.
    First,
    /// A successor drawn from a generator seeded per case.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub delay: String,
    pub action: String,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub id: String,
    pub expected: Verdict,
    pub observed: Verdict,
    pub agreement: bool,
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

struct Run<'a> {
    tester: &'a TesterGraph,
    state: StateId,
    spec: Valuation,
    imp: Configuration,
}

enum Outcome {
    Continue,
    Stop(Verdict, Option<String>),
}

fn case_seed(seed: u64, id: &str) -> u64 {
    id.bytes().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

pub fn run_case(imp: &TimedModel, tc: &TimedTestCase, tester: &TesterGraph, policy: ChoicePolicy) -> RunReport {
    let mut rng = match policy {
        ChoicePolicy::First => None,
        ChoicePolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(case_seed(seed, &tc.id))),
    };
    let mut run = Run {
        tester,
        state: tester.initial(),
        spec: Valuation::zero(tester.clocks().clocks().iter().cloned()),
        imp: imp.initial_configuration(),
    };
    let mut steps = Vec::with_capacity(tc.steps.len());
    let mut stop = None;
    for step in &tc.steps {
        let (outcome, accepted) = run.step(imp, step.delay, &step.action, rng.as_mut());
        steps.push(StepRecord { delay: format_time(&step.delay), action: step.action.to_string(), accepted });
        if let Outcome::Stop(v, diag) = outcome {
            stop = Some((v, diag));
            break;
        }
    }
    let (observed, diagnostic) = stop.unwrap_or_else(|| (tester.verdict(run.state).unwrap_or(Verdict::Pass), None));
    let agreement = if tc.is_probe() { observed != Verdict::Fail } else { observed == tc.expected };
    RunReport { id: tc.id.clone(), expected: tc.expected, observed, agreement, steps, diagnostic }
}

impl Run<'_> {
    fn step(
        &mut self,
        imp: &TimedModel,
        delay: Time,
        action: &crate::model::Action,
        rng: Option<&mut ChaCha8Rng>,
    ) -> (Outcome, bool) {
        let fail = |msg: String| (Outcome::Stop(Verdict::Fail, Some(msg)), false);
        self.spec = self.spec.delayed(delay);
        self.imp = match step_delay(&self.imp, delay) {
            Ok(c) => c,
            Err(e) => return fail(e.to_string()),
        };
        if !imp.alphabet.contains(action) {
            return fail(format!("action {action} is not in the implementation alphabet"));
        }
        let mc = self.tester.clocks();
        let region = match mc.region_of(&self.spec) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        let Some(eid) = self.tester.edge_for(self.state, action, &region) else {
            return fail(format!("tester has no edge for {action} at {}", self.tester.state_label(self.state)));
        };
        let edge = self.tester.edge(eid);
        let successors = match step_action(imp, &self.imp, action) {
            Ok(s) => s,
            Err(e) => return fail(e.to_string()),
        };
        let accepted = !successors.is_empty();
        if self.tester.is_fail(edge.target) {
            return if accepted {
                (
                    Outcome::Stop(Verdict::Fail, Some(format!("accepted {action} where the tester expects a refusal"))),
                    true,
                )
            } else {
                (Outcome::Stop(Verdict::Pass, None), false)
            };
        }
        if !accepted {
            let state = self.tester.state(self.state);
            let covered = state
                .refusals
                .permanently_refuses(action)
                .any(|r| mc.region_entails(&region, &r.guard).unwrap_or(false));
            let verdict = if covered { Verdict::Incon } else { Verdict::Fail };
            return (Outcome::Stop(verdict, Some(format!("refused {action}"))), false);
        }
        let pick = match rng {
            Some(rng) => rng.gen_range(0..successors.len()),
            None => 0,
        };
        self.imp = successors[pick].clone();
        if let Some(x) = &edge.reset {
            self.spec.set(x.as_str(), Time::zero()).expect("tester clock");
        }
        self.state = edge.target;
        (Outcome::Continue, true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SuiteSummary {
    pub pass: usize,
    pub incon: usize,
    pub fail: usize,
    pub disagreements: Vec<String>,
    pub reports: Vec<RunReport>,
}

impl SuiteSummary {
    pub fn total(&self) -> usize {
        self.reports.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            let _ = write!(
                out,
                "case {} expected={} observed={} {}",
                r.id,
                r.expected,
                r.observed,
                if r.agreement { "agree" } else { "DISAGREE" }
            );
            if let Some(d) = &r.diagnostic {
                let _ = write!(out, " ({d})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "total={} pass={} incon={} fail={} disagreements={}",
            self.total(),
            self.pass,
            self.incon,
            self.fail,
            self.disagreements.len()
        );
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable summary");
        s.push('\n');
        s
    }
}

/// Runs every case; reports are ordered by case id (numerically when ids
/// are numbers).
pub fn run_suite(
    imp: &TimedModel,
    suite: &[TimedTestCase],
    tester: &TesterGraph,
    policy: ChoicePolicy,
) -> SuiteSummary {
    let mut ordered: BTreeMap<(u64, String), RunReport> = BTreeMap::new();
    for tc in suite {
        let key = (tc.id.parse().unwrap_or(u64::MAX), tc.id.clone());
        ordered.insert(key, run_case(imp, tc, tester, policy));
    }
    let mut summary = SuiteSummary::default();
    for r in ordered.into_values() {
        match r.observed {
            Verdict::Pass => summary.pass += 1,
            Verdict::Incon => summary.incon += 1,
            Verdict::Fail => summary.fail += 1,
        }
        if !r.agreement {
            summary.disagreements.push(r.id.clone());
        }
        summary.reports.push(r);
    }
    summary
}
