mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{fixtures, sig, values};
use trrg::determinize::determinize;
use trrg::dot::{emit_model, emit_tester, parse_model_text};
use trrg::graph::Verdict;
use trrg::harness::{run_case, ChoicePolicy};
use trrg::model::{AtomicConstraint, Clock, CmpOp, Edge, Guard, Location, Time, TimedModel};
use trrg::refusal::decorate;
use trrg::region::MaxConstants;
use trrg::synth::{random_model, SynthParams};
use trrg::testcase::{concretize, concretize_all, covering_suite, extract_cases, replay_check};
use trrg::tester::{build_tester, completeness_check};
use trrg::trrg::{build_trrg, build_trrg_with_model, determinism_violations};

fn op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Eq), Just(CmpOp::Ge), Just(CmpOp::Gt)]
}

fn guard() -> impl Strategy<Value = Guard> {
    prop::collection::vec((prop::sample::select(vec!["x", "y", "z"]), op(), 0u32..6), 0..4)
        .prop_map(|v| Guard::new(v.into_iter().map(|(c, o, b)| AtomicConstraint::new(c, o, b)).collect()))
}

fn time() -> impl Strategy<Value = Time> {
    (0i64..40, 1i64..5).prop_map(|(n, d)| Time::new(n, d))
}

fn params() -> impl Strategy<Value = (SynthParams, u64)> {
    (1usize..6, 1usize..4, 1usize..4, 1usize..9, 1u32..4, any::<u64>()).prop_map(|(l, c, a, e, k, seed)| {
        (SynthParams { locations: l, clocks: c, actions: a, edges: e, max_constant: k }, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn guard_text_round_trips(g in guard()) {
        let back: Guard = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn normalization_keeps_meaning(g in guard(), x in time(), y in time(), z in time()) {
        let v = [("x", x), ("y", y), ("z", z)].into_iter().map(|(c, t)| (Clock::from(c), t)).collect();
        let holds = g.satisfied_by(&v).unwrap();
        match g.normalized() {
            Some(n) => prop_assert_eq!(n.satisfied_by(&v).unwrap(), holds),
            None => prop_assert!(!holds),
        }
        prop_assert_eq!(g.is_satisfiable(), g.normalized().is_some());
    }

    #[test]
    fn dot_parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse_model_text(&text);
    }

    #[test]
    fn mangled_fixtures_never_panic(idx in 0usize..8, cut in any::<prop::sample::Index>(), junk in "[\"=;\\[\\]{}a-z0-9<>&, ]{0,12}") {
        let fx = fixtures();
        let (_, text, _) = &fx[idx % fx.len()];
        let at = cut.index(text.len() + 1);
        let at = (0..=at).rev().find(|&i| text.is_char_boundary(i)).unwrap();
        let mangled = format!("{}{junk}{}", &text[..at], &text[at..]);
        let _ = parse_model_text(&mangled);
        let _ = parse_model_text(&text[..at]);
    }

    #[test]
    fn delay_stays_in_successor_closure(c in prop::collection::vec(0u32..4, 1..4), v in prop::collection::vec(time(), 3), d in time()) {
        let mc = MaxConstants::new(c.iter().enumerate().map(|(i, &k)| (Clock::from(format!("c{i}")), k)).collect());
        let u: Vec<Time> = v[..c.len()].to_vec();
        let r = mc.region_of(&common::valuation(&mc, &u)).unwrap();
        let later: Vec<Time> = u.iter().map(|t| t + d).collect();
        let r2 = mc.region_of(&common::valuation(&mc, &later)).unwrap();
        prop_assert!(mc.succ_closure(&r).contains(&r2));
        prop_assert_eq!(sig(&values(&mc, &mc.representative(&r2)), &c), sig(&later, &c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_models_round_trip((p, seed) in params()) {
        let m = random_model(&p, seed);
        let text = emit_model(&m).to_string();
        let back = parse_model_text(&text).unwrap();
        prop_assert_eq!(back.canonicalized(), m.canonicalized());
        prop_assert_eq!(emit_model(&back).to_string(), text);
    }

    #[test]
    fn trrg_is_deterministic_and_tester_complete((p, seed) in params()) {
        let m = random_model(&p, seed);
        let g = build_trrg(&m).unwrap();
        prop_assert!(determinism_violations(&g).is_empty());
        let t = build_tester(g.clone()).unwrap();
        prop_assert!(completeness_check(&t).is_empty());
        prop_assert_eq!(emit_tester(&t).to_string(), emit_tester(&build_tester(build_trrg(&m).unwrap()).unwrap()).to_string());
        // fail is reached only through the sink
        for s in 0..t.states().len() {
            prop_assert_eq!(t.verdict(s) == Some(Verdict::Fail), t.is_fail(s));
        }
    }

    #[test]
    fn cases_replay_and_conform((p, seed) in params()) {
        let m = random_model(&p, seed);
        let (d, g) = build_trrg_with_model(&m).unwrap();
        let t = build_tester(g).unwrap();
        let deterministic = d.subsets.iter().all(|s| s.members.len() == 1);
        let mut cases = covering_suite(&t, 5, true);
        cases.extend(extract_cases(&t, 3, true));
        for (i, c) in cases.iter().enumerate() {
            let tc = concretize(&t, c, i.to_string());
            prop_assert_eq!(replay_check(&d, &t, c, &tc), Ok(()));
            let r = run_case(&m, &tc, &t, ChoicePolicy::Seeded(seed));
            prop_assert_ne!(r.observed, Verdict::Fail, "{}", tc);
            if deterministic {
                prop_assert!(r.agreement, "{}", tc);
            } else {
                prop_assert!(r.agreement || r.observed == Verdict::Incon, "{}", tc);
            }
        }
    }

    #[test]
    fn deterministic_models_have_no_permanent_refusals((p, seed) in params()) {
        let m = random_model(&p, seed);
        let d = determinize(&m).unwrap();
        if d.subsets.iter().all(|s| s.members.len() == 1) {
            let deco = decorate(&d);
            prop_assert!(deco.values().all(|r| r.permanent.is_empty()));
        }
    }

    #[test]
    fn full_offer_branches_refuse_nothing_permanently(
        g in prop::collection::vec((0u32..3, op()), 1..3),
        split in 1usize..3,
    ) {
        // every branch after `a` offers the same guarded actions
        let guards: Vec<Guard> = g.iter().map(|&(b, o)| Guard::atom("x", o, b)).filter(Guard::is_satisfiable).collect();
        prop_assume!(!guards.is_empty());
        let mut m = TimedModel::new("s0").location(Location::new("end").final_());
        for k in 0..=split {
            m = m.edge(Edge::new("s0", Guard::always(), "a", "x", format!("b{k}")));
            for (i, gd) in guards.iter().enumerate() {
                m = m.edge(Edge::new(format!("b{k}"), gd.clone(), format!("c{i}"), "x", "end"));
            }
        }
        let d = determinize(&m).unwrap();
        let deco = decorate(&d);
        prop_assert!(deco.values().all(|r| r.permanent.is_empty()));
        let t = build_tester(build_trrg(&m).unwrap()).unwrap();
        let suite = concretize_all(&t, &covering_suite(&t, 4, false));
        prop_assert!(suite.iter().all(|tc| run_case(&m, tc, &t, ChoicePolicy::First).observed == Verdict::Pass));
    }
}

#[test]
fn max_constants_from_models_bound_all_guards() {
    for (stem, _, m) in fixtures() {
        let mc = MaxConstants::of_model(&m);
        let consts: BTreeMap<Clock, u32> = m.max_constants();
        for (i, c) in mc.clocks().iter().enumerate() {
            assert_eq!(mc.bound(i), consts.get(c).copied().unwrap_or(0), "{stem}");
        }
    }
}
