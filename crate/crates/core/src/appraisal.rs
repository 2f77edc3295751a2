//! The seven appraisal variables and their normalization.
//!
//! Every variable is a pure function of the event, the memory snapshot and
//! `d_e`, so they can be evaluated in any order or concurrently.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{average_past_degree, past_impacts, Memory, Preference, StandardEntry};
use crate::types::{EntityId, EntityProfile, EventRecord, Valence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppraisalVariable {
    GoalConduciveness,
    Desirability,
    Praiseworthiness,
    Appealingness,
    Deservingness,
    Familiarity,
    Unexpectedness,
}

impl AppraisalVariable {
    pub const COUNT: usize = 7;
    pub const ALL: [AppraisalVariable; 7] = [
        AppraisalVariable::GoalConduciveness,
        AppraisalVariable::Desirability,
        AppraisalVariable::Praiseworthiness,
        AppraisalVariable::Appealingness,
        AppraisalVariable::Deservingness,
        AppraisalVariable::Familiarity,
        AppraisalVariable::Unexpectedness,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AppraisalVariable::GoalConduciveness => "goal_conduciveness",
            AppraisalVariable::Desirability => "desirability",
            AppraisalVariable::Praiseworthiness => "praiseworthiness",
            AppraisalVariable::Appealingness => "appealingness",
            AppraisalVariable::Deservingness => "deservingness",
            AppraisalVariable::Familiarity => "familiarity",
            AppraisalVariable::Unexpectedness => "unexpectedness",
        }
    }

    /// Declared output range after normalization.
    pub fn range(self) -> Range {
        match self {
            AppraisalVariable::Familiarity | AppraisalVariable::Unexpectedness => Range::Unit,
            _ => Range::Signed,
        }
    }
}

impl fmt::Display for AppraisalVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AppraisalVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AppraisalVariable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::invalid("appraisal variable", format!("unknown variable `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Range {
    /// `[0, 1]`
    Unit,
    /// `[-1, 1]`
    Signed,
}

/// `gap / (1 + e^{-steepness (x - midpoint)}) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticParams {
    pub gap: f64,
    pub steepness: f64,
    pub midpoint: f64,
    pub offset: f64,
}

impl LogisticParams {
    pub const UNIT: LogisticParams = LogisticParams {
        gap: 1.0,
        steepness: 10.0,
        midpoint: 0.5,
        offset: 0.0,
    };
    pub const SIGNED: LogisticParams = LogisticParams {
        gap: 2.0,
        steepness: 5.0,
        midpoint: 0.0,
        offset: -1.0,
    };

    pub fn apply(&self, x: f64) -> f64 {
        self.gap / (1.0 + (-self.steepness * (x - self.midpoint)).exp()) + self.offset
    }

    /// Inverse of [`apply`](Self::apply) on the open output range.
    pub fn invert(&self, y: f64) -> f64 {
        let p = (y - self.offset) / self.gap;
        self.midpoint + (p / (1.0 - p)).ln() / self.steepness
    }

    pub fn validate(&self) -> Result<()> {
        if self.gap > 0.0 && self.steepness > 0.0 && self.midpoint.is_finite() && self.offset.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("logistic params", format!("{self:?}")))
        }
    }
}

/// Logistic parameters per output range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Normalization {
    pub unit: LogisticParams,
    pub signed: LogisticParams,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            unit: LogisticParams::UNIT,
            signed: LogisticParams::SIGNED,
        }
    }
}

impl Normalization {
    pub fn params(&self, range: Range) -> &LogisticParams {
        match range {
            Range::Unit => &self.unit,
            Range::Signed => &self.signed,
        }
    }
}

pub fn normalize_appraisal(value: f64, range: Range) -> f64 {
    Normalization::default().params(range).apply(value)
}

/// Conduciveness of an event of degree `d_e` to a goal of degree `d_g` at height `h`.
pub fn goal_conduciveness(d_g: f64, d_e: f64, h: u32) -> Result<f64> {
    if h == 0 {
        return Err(Error::Domain("goal height 0 is the unscored root".into()));
    }
    let h = f64::from(h);
    let v = match (d_g == 0.0, d_e == 0.0) {
        (true, true) => 1.0,
        (true, false) => -d_e.abs() / h,
        (false, true) => -d_g.abs() / h,
        (false, false) => {
            let gap = (d_g.abs() - d_e.abs()).abs() / h;
            if (d_g > 0.0) == (d_e > 0.0) {
                1.0 - gap
            } else {
                gap - 1.0
            }
        }
    };
    Ok(v)
}

/// Conduciveness of one relevant goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalScore {
    pub subject: String,
    pub target: Option<EntityId>,
    pub height: u32,
    pub value: f64,
}

pub fn goal_scores(event: &EventRecord, memory: &Memory, d_e: f64) -> Result<Vec<GoalScore>> {
    memory
        .goals
        .relevant_goals(event)
        .into_iter()
        .map(|g| {
            Ok(GoalScore {
                subject: g.node.subject.clone(),
                target: g.node.target.clone(),
                height: g.height,
                value: goal_conduciveness(g.node.degree, d_e, g.height)?,
            })
        })
        .collect()
}

/// Mean conduciveness over the relevant goals; 0 when none are relevant.
pub fn desirability(scores: &[GoalScore]) -> f64 {
    if scores.is_empty() {
        0.0
    } else {
        scores.iter().map(|s| s.value).sum::<f64>() / scores.len() as f64
    }
}

pub fn praiseworthiness(d_e: f64, standard: &StandardEntry) -> f64 {
    let d_a = standard.approval_degree;
    match standard.preference {
        _ if d_e == 0.0 => standard.signed_approval(),
        Preference::Yes if d_e < 0.0 => -(d_e * d_a),
        Preference::No if d_e < 0.0 => d_e * d_a,
        Preference::Yes => d_e * d_a,
        Preference::No => -(d_e * d_a),
    }
}

pub fn appealingness(profile: &EntityProfile) -> f64 {
    profile.perception
}

pub fn familiarity_appraisal(profile: &EntityProfile) -> f64 {
    profile.familiarity
}

/// Unnormalized deservingness of the event's target.
pub fn deservingness(event: &EventRecord, d_e: f64, memory: &Memory) -> f64 {
    if event.target.is_self() {
        return d_e;
    }
    let to_source = past_impacts(&event.target, &event.source, &memory.history);
    let to_me = past_impacts(&event.target, &EntityId::self_id(), &memory.history);
    let history = to_source.net() + to_me.net();
    match Valence::of(d_e) {
        Valence::Positive => d_e + history,
        Valence::Negative => d_e - history,
    }
}

/// Unnormalized unexpectedness, in `[0, 2]`.
pub fn unexpectedness(d_e: f64, d_e_avg: f64) -> f64 {
    (d_e_avg - d_e).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppraisalVector {
    pub goals: Vec<GoalScore>,
    pub desirability: f64,
    pub praiseworthiness: f64,
    pub appealingness: f64,
    pub deservingness: f64,
    pub familiarity: f64,
    pub unexpectedness: f64,
}

impl AppraisalVector {
    pub fn zero() -> Self {
        AppraisalVector {
            goals: Vec::new(),
            desirability: 0.0,
            praiseworthiness: 0.0,
            appealingness: 0.0,
            deservingness: 0.0,
            familiarity: 0.0,
            unexpectedness: 0.0,
        }
    }

    /// Scalar value of a variable. Goal conduciveness reports the mean over goals.
    pub fn value(&self, var: AppraisalVariable) -> f64 {
        match var {
            AppraisalVariable::GoalConduciveness => desirability(&self.goals),
            AppraisalVariable::Desirability => self.desirability,
            AppraisalVariable::Praiseworthiness => self.praiseworthiness,
            AppraisalVariable::Appealingness => self.appealingness,
            AppraisalVariable::Deservingness => self.deservingness,
            AppraisalVariable::Familiarity => self.familiarity,
            AppraisalVariable::Unexpectedness => self.unexpectedness,
        }
    }

    pub fn values(&self) -> [f64; AppraisalVariable::COUNT] {
        AppraisalVariable::ALL.map(|v| self.value(v))
    }

    pub fn from_values(values: [f64; AppraisalVariable::COUNT]) -> Self {
        AppraisalVector {
            goals: Vec::new(),
            desirability: values[1],
            praiseworthiness: values[2],
            appealingness: values[3],
            deservingness: values[4],
            familiarity: values[5],
            unexpectedness: values[6],
        }
    }

    pub fn in_range(&self) -> bool {
        let within = |v: f64, r: Range| match r {
            Range::Unit => (0.0..=1.0).contains(&v),
            Range::Signed => (-1.0..=1.0).contains(&v),
        };
        AppraisalVariable::ALL
            .iter()
            .all(|&var| within(self.value(var), var.range()))
            && self.goals.iter().all(|g| within(g.value, Range::Signed))
    }
}

enum Computed {
    Goals(Vec<GoalScore>),
    Scalar(AppraisalVariable, f64),
}

fn compute(
    var: AppraisalVariable,
    event: &EventRecord,
    memory: &Memory,
    d_e: f64,
    norm: &Normalization,
) -> Result<Computed> {
    let source = || memory.entities.profile(&event.source);
    let v = match var {
        AppraisalVariable::GoalConduciveness => return goal_scores(event, memory, d_e).map(Computed::Goals),
        AppraisalVariable::Desirability => desirability(&goal_scores(event, memory, d_e)?),
        AppraisalVariable::Praiseworthiness => {
            let standard =
                memory
                    .standards
                    .get_or_neutral(&event.action.name, &event.source, &event.target);
            praiseworthiness(d_e, &standard)
        }
        AppraisalVariable::Appealingness => appealingness(&source()),
        AppraisalVariable::Familiarity => familiarity_appraisal(&source()),
        AppraisalVariable::Deservingness => norm.signed.apply(deservingness(event, d_e, memory)),
        AppraisalVariable::Unexpectedness => {
            let avg = average_past_degree(&event.source, &event.target, &memory.history);
            norm.unit.apply(unexpectedness(d_e, avg))
        }
    };
    Ok(Computed::Scalar(var, v))
}

fn assemble(parts: Vec<Computed>) -> AppraisalVector {
    let mut out = AppraisalVector::zero();
    for part in parts {
        match part {
            Computed::Goals(g) => out.goals = g,
            Computed::Scalar(var, v) => match var {
                AppraisalVariable::GoalConduciveness => {}
                AppraisalVariable::Desirability => out.desirability = v,
                AppraisalVariable::Praiseworthiness => out.praiseworthiness = v,
                AppraisalVariable::Appealingness => out.appealingness = v,
                AppraisalVariable::Deservingness => out.deservingness = v,
                AppraisalVariable::Familiarity => out.familiarity = v,
                AppraisalVariable::Unexpectedness => out.unexpectedness = v,
            },
        }
    }
    out
}

/// Appraises an event against a memory snapshot with the shipped normalization.
pub fn appraise(event: &EventRecord, memory: &Memory, d_e: f64) -> Result<AppraisalVector> {
    appraise_with(event, memory, d_e, &Normalization::default())
}

pub fn appraise_with(
    event: &EventRecord,
    memory: &Memory,
    d_e: f64,
    norm: &Normalization,
) -> Result<AppraisalVector> {
    appraise_in_order(event, memory, d_e, norm, &AppraisalVariable::ALL)
}

/// Evaluates the variables in the given order. `order` must list every variable.
pub fn appraise_in_order(
    event: &EventRecord,
    memory: &Memory,
    d_e: f64,
    norm: &Normalization,
    order: &[AppraisalVariable],
) -> Result<AppraisalVector> {
    check_order(order)?;
    let parts = order
        .iter()
        .map(|&v| compute(v, event, memory, d_e, norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(parts))
}

/// Evaluates every variable on its own thread against the same snapshot.
pub fn appraise_concurrent(
    event: &EventRecord,
    memory: &Memory,
    d_e: f64,
    norm: &Normalization,
) -> Result<AppraisalVector> {
    let parts = std::thread::scope(|s| {
        let handles: Vec<_> = AppraisalVariable::ALL
            .iter()
            .map(|&v| s.spawn(move || compute(v, event, memory, d_e, norm)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("appraisal thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble(parts))
}

fn check_order(order: &[AppraisalVariable]) -> Result<()> {
    let mut seen = [false; AppraisalVariable::COUNT];
    for v in order {
        seen[v.index()] = true;
    }
    if order.len() == AppraisalVariable::COUNT && seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(Error::invalid("appraisal order", "must list every variable exactly once"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{GoalNode, GoalTree};
    use crate::types::ActionSpec;
    use chrono::{DateTime, Duration};
    use proptest::prelude::*;

    fn event(source: &str, action: &str, degree: f64, target: &str, t: i64) -> EventRecord {
        let a = ActionSpec::new(action, Valence::of(degree), degree).unwrap();
        EventRecord::new(
            source.into(),
            a,
            target.into(),
            DateTime::UNIX_EPOCH + Duration::seconds(t),
        )
        .unwrap()
    }

    fn standard(pref: Preference, d_a: f64) -> StandardEntry {
        StandardEntry {
            subject: "Kick".into(),
            source: "JOHN".into(),
            target: "SELF".into(),
            preference: pref,
            approval_degree: d_a,
        }
    }

    #[test]
    fn goal_conduciveness_examples() {
        assert_eq!(goal_conduciveness(0.0, 0.0, 3).unwrap(), 1.0);
        assert_eq!(goal_conduciveness(0.5, 0.5, 1).unwrap(), 1.0);
        assert_eq!(goal_conduciveness(0.5, -0.5, 1).unwrap(), -1.0);
        assert!((goal_conduciveness(0.0, -0.6, 2).unwrap() - -0.3).abs() < 1e-15);
        assert!(goal_conduciveness(0.5, 0.5, 0).is_err());
    }

    #[test]
    fn desirability_examples() {
        let s = |v| GoalScore {
            subject: "g".into(),
            target: None,
            height: 2,
            value: v,
        };
        assert_eq!(desirability(&[s(1.0)]), 1.0);
        assert_eq!(desirability(&[s(1.0), s(-1.0)]), 0.0);
        assert_eq!(desirability(&[]), 0.0);
    }

    #[test]
    fn praiseworthiness_examples() {
        assert!((praiseworthiness(-0.74, &standard(Preference::No, 0.8)) - -0.592).abs() < 1e-15);
        assert_eq!(praiseworthiness(0.0, &standard(Preference::Yes, 0.3)), 0.3);
        assert_eq!(praiseworthiness(0.0, &standard(Preference::No, 0.3)), -0.3);
        assert!((praiseworthiness(0.31, &standard(Preference::Yes, 0.5)) - 0.155).abs() < 1e-15);
        assert!((praiseworthiness(-0.74, &standard(Preference::Yes, 0.5)) - 0.37).abs() < 1e-15);
        assert!((praiseworthiness(0.31, &standard(Preference::No, 0.5)) - -0.155).abs() < 1e-15);
    }

    #[test]
    fn profile_passthrough() {
        let paul = EntityProfile {
            name: "PAUL".into(),
            familiarity: 0.2,
            perception: -0.4,
        };
        assert_eq!(appealingness(&paul), -0.4);
        assert_eq!(familiarity_appraisal(&paul), 0.2);
        let s = EntityProfile::stranger("X".into());
        assert_eq!((appealingness(&s), familiarity_appraisal(&s)), (0.0, 1.0));
    }

    #[test]
    fn deservingness_examples() {
        let m = Memory::default();
        assert_eq!(deservingness(&event("A", "Greet", 0.31, "SELF", 0), 0.31, &m), 0.31);
        assert_eq!(deservingness(&event("PAUL", "Greet", 0.31, "CARL", 0), 0.31, &m), 0.31);

        // Carl once kicked the agent; Paul and Carl share no history.
        let mut m = Memory::default();
        m.history.push(event("CARL", "Kick", -0.74, "SELF", 0)).unwrap();
        let d = deservingness(&event("PAUL", "Greet", 0.31, "CARL", 1), 0.31, &m);
        assert!((d - (0.31 - 0.74)).abs() < 1e-15);
        let d = deservingness(&event("PAUL", "Kick", -0.74, "CARL", 1), -0.74, &m);
        assert!((d - 0.0).abs() < 1e-15);
    }

    #[test]
    fn unexpectedness_examples() {
        assert_eq!(unexpectedness(0.3, 0.3), 0.0);
        assert!((unexpectedness(-0.74, 0.5) - 1.24).abs() < 1e-15);
        assert_eq!(unexpectedness(-0.74, 0.0), 0.74);
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_appraisal(0.5, Range::Unit), 0.5);
        assert_eq!(normalize_appraisal(0.0, Range::Signed), 0.0);
        assert!((normalize_appraisal(1.24, Range::Unit) - 0.9993891206405656).abs() < 1e-12);
        let p = LogisticParams::UNIT;
        assert!((p.invert(p.apply(0.37)) - 0.37).abs() < 1e-12);
    }

    #[test]
    fn stranger_event_vector() {
        let mut m = Memory {
            goals: GoalTree {
                self_goals: vec![GoalNode::new("joy", Some("SELF".into()), 0.8)],
                other_goals: vec![],
            },
            ..Memory::default()
        };
        let e = event("JOHN", "Greet", 0.31, "SELF", 0);
        let v = appraise(&e, &m, 0.31).unwrap();
        assert_eq!(v.familiarity, 1.0);
        assert_eq!(v.appealingness, 0.0);
        assert!((v.desirability - (1.0 - (0.8 - 0.31) / 2.0)).abs() < 1e-15);
        assert!(v.in_range());

        m.entities.insert(EntityProfile::stranger("JOHN".into())).unwrap();
        let w = appraise_concurrent(&e, &m, 0.31, &Normalization::default()).unwrap();
        assert_eq!(v, w);
    }

    proptest! {
        #[test]
        fn normalization_is_monotone_and_bounded(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            for r in [Range::Unit, Range::Signed] {
                let (lo, hi) = if r == Range::Unit { (0.0, 1.0) } else { (-1.0, 1.0) };
                let (na, nb) = (normalize_appraisal(a, r), normalize_appraisal(b, r));
                prop_assert!(na >= lo && na <= hi);
                if a < b { prop_assert!(na <= nb); }
            }
        }

        #[test]
        fn conduciveness_symmetric_under_negation(g in -1.0f64..1.0, e in -1.0f64..1.0, h in 1u32..8) {
            let a = goal_conduciveness(g, e, h).unwrap();
            let b = goal_conduciveness(-g, -e, h).unwrap();
            prop_assert!((a - b).abs() < 1e-15);
            prop_assert!((-1.0..=1.0).contains(&a));
        }

        #[test]
        fn deviation_vanishes_with_height(e in 0.01f64..1.0, h in 1u32..1000) {
            prop_assert_eq!(goal_conduciveness(e, -e, h).unwrap(), -1.0);
            prop_assert!((goal_conduciveness(0.0, e, h).unwrap() + e / f64::from(h)).abs() < 1e-15);
        }

        #[test]
        fn any_order_gives_the_same_vector(seed in any::<u64>(), d in -1.0f64..1.0) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order = AppraisalVariable::ALL;
            order.shuffle(&mut rng);
            let mut m = Memory::default();
            m.goals.self_goals.push(GoalNode::new("joy", Some("SELF".into()), 0.5));
            m.history.push(event("A", "Greet", 0.31, "SELF", 0)).unwrap();
            let e = event("A", "X", d, "SELF", 1);
            let norm = Normalization::default();
            let base = appraise_with(&e, &m, d, &norm).unwrap();
            prop_assert_eq!(&base, &appraise_in_order(&e, &m, d, &norm, &order).unwrap());
            prop_assert!(base.in_range());
        }
    }
}
