//! Collapsing the active emotions into one regulated state.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::emotion::{Emotion, EmotionSpec, EmotionTable};
use crate::error::{Error, Result};
use crate::memory::Standards;
use crate::types::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Highest,
    Blended,
    #[default]
    Ethical,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Highest => "highest",
            Strategy::Blended => "blended",
            Strategy::Ethical => "ethical",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "highest" => Ok(Strategy::Highest),
            "blended" => Ok(Strategy::Blended),
            "ethical" => Ok(Strategy::Ethical),
            _ => Err(Error::invalid(
                "strategy",
                format!("`{s}` (expected highest, blended or ethical)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EthicsDiagnostic {
    pub emotion: Emotion,
    pub cos: f64,
    pub qe: f64,
    pub coe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulationOutcome {
    pub strategy: Strategy,
    /// Emotion name, `blended`, or `none` when nothing is active.
    pub label: String,
    /// Selected emotion, or the strongest contributor for blended outcomes.
    pub emotion: Option<Emotion>,
    pub intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<EthicsDiagnostic>>,
}

impl RegulationOutcome {
    pub fn none(strategy: Strategy) -> Self {
        RegulationOutcome {
            strategy,
            label: "none".into(),
            emotion: None,
            intensity: 0.0,
            diagnostics: (strategy == Strategy::Ethical).then(Vec::new),
        }
    }

    fn chosen(strategy: Strategy, emotion: Emotion, intensity: f64) -> Self {
        RegulationOutcome {
            strategy,
            label: emotion.name().into(),
            emotion: Some(emotion),
            intensity,
            diagnostics: None,
        }
    }
}

/// Higher score wins; ties go to the larger `|valence_degree|`, then the smaller name.
fn rank(a: (Emotion, f64), b: (Emotion, f64), table: &EmotionTable) -> Ordering {
    let deg = |e: Emotion| table.get(e).valence_degree.abs();
    a.1.total_cmp(&b.1)
        .then_with(|| deg(a.0).total_cmp(&deg(b.0)))
        .then_with(|| b.0.name().cmp(a.0.name()))
}

fn best(scored: impl Iterator<Item = (Emotion, f64)>, table: &EmotionTable) -> Option<(Emotion, f64)> {
    scored.max_by(|&a, &b| rank(a, b, table))
}

pub fn select_highest(active: &[(Emotion, f64)], table: &EmotionTable) -> RegulationOutcome {
    match best(active.iter().copied(), table) {
        Some((e, i)) => RegulationOutcome::chosen(Strategy::Highest, e, i),
        None => RegulationOutcome::none(Strategy::Highest),
    }
}

/// `0.1 log2 sum 2^(10 i)`, evaluated with the largest term factored out.
pub fn blended_intensity(intensities: &[f64]) -> Result<f64> {
    let max = intensities
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| Error::Domain("blending needs at least one intensity".into()))?;
    let sum: f64 = intensities.iter().map(|i| (10.0 * (i - max)).exp2()).sum();
    Ok(max + 0.1 * sum.log2())
}

pub fn select_blended(active: &[(Emotion, f64)], table: &EmotionTable) -> RegulationOutcome {
    let Some((dominant, _)) = best(active.iter().copied(), table) else {
        return RegulationOutcome::none(Strategy::Blended);
    };
    let values: Vec<f64> = active.iter().map(|a| a.1).collect();
    let blended = blended_intensity(&values).expect("non-empty");
    RegulationOutcome {
        strategy: Strategy::Blended,
        label: "blended".into(),
        emotion: Some(dominant),
        intensity: blended.clamp(0.0, 1.0),
        diagnostics: None,
    }
}

/// Mean signed approval of the standards for showing `emotion` toward `target`.
pub fn coefficient_of_standard(emotion: Emotion, target: &EntityId, standards: &Standards) -> f64 {
    let (sum, n) = standards
        .about(emotion.name(), target)
        .fold((0.0, 0usize), |(s, n), st| (s + st.signed_approval(), n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn quantified_emotion(spec: &EmotionSpec, intensity: f64) -> f64 {
    spec.valence_degree * intensity
}

pub fn coefficient_of_ethics(cos: f64, qe: f64) -> f64 {
    cos * qe.abs()
}

pub fn select_ethical(
    active: &[(Emotion, f64)],
    table: &EmotionTable,
    target: &EntityId,
    standards: &Standards,
) -> RegulationOutcome {
    let diagnostics: Vec<EthicsDiagnostic> = active
        .iter()
        .map(|&(emotion, intensity)| {
            let cos = coefficient_of_standard(emotion, target, standards);
            let qe = quantified_emotion(table.get(emotion), intensity);
            EthicsDiagnostic {
                emotion,
                cos,
                qe,
                coe: coefficient_of_ethics(cos, qe),
            }
        })
        .collect();
    let Some((emotion, _)) = best(diagnostics.iter().map(|d| (d.emotion, d.coe)), table) else {
        return RegulationOutcome::none(Strategy::Ethical);
    };
    if diagnostics.iter().all(|d| d.cos == 0.0) {
        log::debug!("no standards toward {target}: ethical choice falls to the tie-break");
    }
    let intensity = active.iter().find(|a| a.0 == emotion).expect("selected from active").1;
    RegulationOutcome {
        diagnostics: Some(diagnostics),
        ..RegulationOutcome::chosen(Strategy::Ethical, emotion, intensity)
    }
}

pub fn regulate(
    strategy: Strategy,
    active: &[(Emotion, f64)],
    table: &EmotionTable,
    target: &EntityId,
    standards: &Standards,
) -> RegulationOutcome {
    match strategy {
        Strategy::Highest => select_highest(active, table),
        Strategy::Blended => select_blended(active, table),
        Strategy::Ethical => select_ethical(active, table, target, standards),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{Preference, StandardEntry};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    fn std_entry(subject: &str, source: &str, target: &str, pref: Preference, d: f64) -> StandardEntry {
        StandardEntry {
            subject: subject.into(),
            source: source.into(),
            target: target.into(),
            preference: pref,
            approval_degree: d,
        }
    }

    fn anger_toward_john() -> Standards {
        let mut s = Standards::default();
        for e in [
            std_entry("anger", "SELF", "JOHN", Preference::No, 0.8),
            std_entry("anger", "PAUL", "JOHN", Preference::Yes, 0.25),
            std_entry("anger", "DAVID", "JOHN", Preference::No, 0.5),
            std_entry("anger", "SELF", "KATE", Preference::Yes, 1.0),
            std_entry("joy", "SELF", "JOHN", Preference::Yes, 1.0),
        ] {
            s.insert(e).unwrap();
        }
        s
    }

    #[test]
    fn highest_examples() {
        let t = EmotionTable::shipped();
        let o = select_highest(&[(Emotion::Joy, 0.9), (Emotion::Distress, 0.85)], &t);
        assert_eq!((o.emotion, o.intensity), (Some(Emotion::Joy), 0.9));
        let o = select_highest(&[(Emotion::Anger, 0.5)], &t);
        assert_eq!(o.emotion, Some(Emotion::Anger));
        // |cos 0| = 1 beats |cos 8|.
        let o = select_highest(&[(Emotion::Gratitude, 0.5), (Emotion::Joy, 0.5)], &t);
        assert_eq!(o.emotion, Some(Emotion::Joy));
        assert_eq!(select_highest(&[], &t).label, "none");
    }

    #[test]
    fn blended_examples() {
        assert_eq!(blended_intensity(&[0.37]).unwrap(), 0.37);
        let b = blended_intensity(&[0.9, 0.85]).unwrap();
        assert!((0.9..=1.0).contains(&b));
        assert!((blended_intensity(&[0.5, 0.5]).unwrap() - 0.6).abs() < 1e-12);
        assert!(blended_intensity(&[]).is_err());
        let t = EmotionTable::shipped();
        let o = select_blended(&[(Emotion::Joy, 0.95), (Emotion::Gratitude, 0.95)], &t);
        assert_eq!((o.label.as_str(), o.emotion, o.intensity), ("blended", Some(Emotion::Joy), 1.0));
    }

    #[test]
    fn cos_examples() {
        let s = anger_toward_john();
        assert!((coefficient_of_standard(Emotion::Anger, &"JOHN".into(), &s) - -0.35).abs() < 1e-12);
        assert_eq!(coefficient_of_standard(Emotion::Anger, &"KATE".into(), &s), 1.0);
        assert_eq!(coefficient_of_standard(Emotion::Anger, &"NOBODY".into(), &s), 0.0);
    }

    #[test]
    fn qe_and_coe_examples() {
        let t = EmotionTable::shipped();
        assert!((quantified_emotion(t.get(Emotion::Anger), 0.5) - -0.4824).abs() < 1e-4);
        assert_eq!(quantified_emotion(t.get(Emotion::Anger), 0.0), 0.0);
        assert!((quantified_emotion(t.get(Emotion::Joy), 0.7) - 0.7).abs() < 1e-15);
        assert!((coefficient_of_ethics(-0.35, -0.4824) - -0.16884).abs() < 1e-12);
        assert_eq!(coefficient_of_ethics(0.4, 0.0), 0.0);
        assert!((coefficient_of_ethics(0.5, -0.6) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ethics_overrides_intensity() {
        let t = EmotionTable::shipped();
        let mut s = anger_toward_john();
        s.insert(std_entry("sorry_for", "SELF", "JOHN", Preference::Yes, 0.6)).unwrap();
        let active = [(Emotion::Anger, 0.5), (Emotion::SorryFor, 0.3)];
        let o = select_ethical(&active, &t, &"JOHN".into(), &s);
        assert_eq!(o.emotion, Some(Emotion::SorryFor));
        assert_eq!(o.intensity, 0.3);
        let d = o.diagnostics.unwrap();
        assert!((d[0].coe - -0.16883778167004226).abs() < 1e-12);
        assert!((d[1].coe - 0.09538546756197686).abs() < 1e-12);
        assert_eq!(select_highest(&active, &t).emotion, Some(Emotion::Anger));
    }

    #[test]
    fn single_emotion_agrees_across_strategies() {
        let t = EmotionTable::shipped();
        let s = Standards::default();
        let a = [(Emotion::Reproach, 0.42)];
        for strategy in [Strategy::Highest, Strategy::Blended, Strategy::Ethical] {
            let o = regulate(strategy, &a, &t, &"X".into(), &s);
            assert_eq!((o.emotion, o.intensity), (Some(Emotion::Reproach), 0.42));
            assert_eq!(o.diagnostics.is_some(), strategy == Strategy::Ethical);
        }
    }

    proptest! {
        #[test]
        fn blended_sandwich(v in proptest::collection::vec(0.0f64..1.0, 1..10)) {
            let b = blended_intensity(&v).unwrap();
            let max = v.iter().copied().fold(f64::MIN, f64::max);
            prop_assert!(b >= max - 1e-15);
            prop_assert!(b <= max + 0.1 * (v.len() as f64).log2() + 1e-12);
            let mut rev = v.clone();
            rev.reverse();
            prop_assert!((blended_intensity(&rev).unwrap() - b).abs() < 1e-12);
        }

        #[test]
        fn ethical_argmax_invariant_under_approval_scaling(
            degs in proptest::collection::vec(0.05f64..1.0, 10),
            prefs in proptest::collection::vec(any::<bool>(), 10),
            ints in proptest::collection::vec(0.01f64..1.0, 10),
            c in 0.05f64..1.0,
        ) {
            let t = EmotionTable::shipped();
            let mut s = Standards::default();
            let mut scaled = Standards::default();
            for (i, e) in Emotion::ALL.iter().enumerate() {
                let p = if prefs[i] { Preference::Yes } else { Preference::No };
                s.insert(std_entry(e.name(), "SELF", "J", p, degs[i])).unwrap();
                scaled.insert(std_entry(e.name(), "SELF", "J", p, degs[i] * c)).unwrap();
            }
            let active: Vec<_> = Emotion::ALL.iter().copied().zip(ints).collect();
            let a = select_ethical(&active, &t, &"J".into(), &s);
            let b = select_ethical(&active, &t, &"J".into(), &scaled);
            prop_assert_eq!(a.emotion, b.emotion);
        }
    }
}
