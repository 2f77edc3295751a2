use affect_core::config::{EngineConfig, Resources};
use affect_core::engine::{Engine, EventInput};
use affect_core::memory::{GoalNode, GoalTree, Memory};
use affect_core::regulation::Strategy as Regulation;
use affect_core::trace::{trace_to_string, EntryKind, TraceFormat};
use affect_core::PersonalityProfile;
use proptest::prelude::*;

const NAMES: [&str; 4] = ["SELF", "JOHN", "KATE", "PAUL"];
const ACTIONS: [&str; 4] = ["Greet", "StartConversation", "Ignore", "Kick"];

#[derive(Debug, Clone)]
enum Step {
    Event(usize, usize, usize),
    Tick(u64),
}

fn steps() -> impl Strategy<Value = Vec<Step>> {
    let step = prop_oneof![
        3 => (0..4usize, 0..4usize, 0..4usize).prop_map(|(s, a, t)| Step::Event(s, a, t)),
        1 => (1..6u64).prop_map(Step::Tick),
    ];
    proptest::collection::vec(step, 0..50)
}

fn personality() -> impl Strategy<Value = PersonalityProfile> {
    proptest::array::uniform5(0.0f64..=1.0).prop_map(|t| PersonalityProfile::new(t[0], t[1], t[2], t[3], t[4]).unwrap())
}

fn engine(p: PersonalityProfile, strategy: Regulation) -> Engine {
    let memory = Memory {
        goals: GoalTree {
            self_goals: vec![GoalNode::new("joy", Some("SELF".into()), 0.8)],
            other_goals: vec![GoalNode::new("joy", Some("KATE".into()), 0.6)],
        },
        ..Memory::default()
    };
    let config = EngineConfig {
        strategy,
        ..EngineConfig::default()
    };
    Engine::new(config, Resources::default(), p, memory, "default").unwrap()
}

fn run(e: &mut Engine, steps: &[Step]) -> Vec<affect_core::trace::TraceEntry> {
    let mut out = Vec::new();
    for s in steps {
        match *s {
            Step::Event(a, b, c) => out.push(e.process_event(&EventInput::new(NAMES[a], ACTIONS[b], NAMES[c]))),
            Step::Tick(n) => {
                let to = e.clock() + n;
                out.extend(e.advance_to(to));
            }
        }
    }
    out
}

fn strategy() -> impl Strategy<Value = Regulation> {
    prop_oneof![Just(Regulation::Highest), Just(Regulation::Blended), Just(Regulation::Ethical)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn every_entry_is_in_range(p in personality(), s in steps(), st in strategy()) {
        let mut e = engine(p, st);
        for entry in run(&mut e, &s) {
            prop_assert!(entry.intensities.values().all(|i| (0.0..=1.0).contains(i)));
            prop_assert!((-1.0..=1.0).contains(&entry.mood_after));
            if let Some(a) = &entry.appraisal {
                prop_assert!(a.in_range());
            }
            let outcome = entry.outcome.as_ref().unwrap();
            prop_assert!((0.0..=1.0).contains(&outcome.intensity));
            let any_active = entry.intensities.values().any(|&i| i > 0.0);
            prop_assert_eq!(outcome.emotion.is_some(), any_active);
        }
        for prof in e.memory().entities.iter() {
            prop_assert!((-1.0..=1.0).contains(&prof.perception));
            prop_assert!((0.0..=1.0).contains(&prof.familiarity));
        }
    }

    #[test]
    fn decay_never_raises_intensity(p in personality(), s in steps()) {
        let mut e = engine(p, Regulation::Ethical);
        run(&mut e, &s);
        let mut prev = e.affect().intensities;
        for _ in 0..12 {
            let t = e.tick();
            prop_assert_eq!(t.kind, EntryKind::Tick);
            for (emo, &i) in t.intensities.iter() {
                prop_assert!(i <= prev[emo]);
            }
            prev = t.intensities;
        }
        prop_assert!(prev.values().all(|&i| i == 0.0));
    }

    #[test]
    fn identical_inputs_identical_traces(p in personality(), s in steps()) {
        let a = run(&mut engine(p, Regulation::Ethical), &s);
        let b = run(&mut engine(p, Regulation::Ethical), &s);
        prop_assert_eq!(trace_to_string(&a, TraceFormat::Csv), trace_to_string(&b, TraceFormat::Csv));
        prop_assert_eq!(trace_to_string(&a, TraceFormat::Jsonl), trace_to_string(&b, TraceFormat::Jsonl));
    }

    #[test]
    fn resuming_from_a_snapshot_changes_nothing(p in personality(), s in steps(), cut in 0usize..50) {
        let cut = cut.min(s.len());
        let mut whole = engine(p, Regulation::Ethical);
        let full = run(&mut whole, &s);

        let mut first = engine(p, Regulation::Ethical);
        let mut trace = run(&mut first, &s[..cut]);
        let saved = first.snapshot_json();
        let mut second = engine(p, Regulation::Ethical);
        second.restore_json(&saved, "snap", false).unwrap();
        prop_assert_eq!(second.snapshot_json(), saved);
        trace.extend(run(&mut second, &s[cut..]));
        prop_assert_eq!(trace, full);
        prop_assert_eq!(second.snapshot_json(), whole.snapshot_json());
    }
}
