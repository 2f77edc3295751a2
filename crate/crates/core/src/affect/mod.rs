//! Affect generation: appraisal contributions to emotion intensities, the
//! emotion/mood cycle and intensity decay.

pub mod dynamics;
pub mod learning;
pub mod network;

use serde::{Deserialize, Serialize};

use crate::appraisal::{AppraisalVariable, AppraisalVector, LogisticParams};
use crate::emotion::{Emotion, EmotionMap, EmotionSpec, EmotionTable};
use crate::error::{Error, Result};
use crate::types::{MoodState, PersonalityProfile};

pub use dynamics::{AffectState, CompensationOrder};
pub use network::{Factors, WeightModel};

/// `sum_x f_x m_x` for the `(emotion, variable)` link, clamped to `[-1, 1]`.
pub fn association_weight(
    model: &WeightModel,
    emotion: Emotion,
    variable: AppraisalVariable,
    factors: &Factors,
) -> Result<f64> {
    model
        .raw_weight(emotion, variable, factors)
        .map(|w| w.clamp(-1.0, 1.0))
        .ok_or_else(|| Error::Domain(format!("no link from {variable} to {emotion}")))
}

pub fn contribution(value: f64, weight: f64) -> f64 {
    value * weight
}

/// `sign(base) |base|^exponent` with the exponent clamped to `[0, 1]`; 0 when `base` is 0.
pub fn signed_power(base: f64, exponent: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        base.signum() * base.abs().powf(exponent.clamp(0.0, 1.0))
    }
}

/// Per-link contributions `c = v w`; missing links contribute 0.
fn contributions(
    appraisal: &AppraisalVector,
    model: &WeightModel,
    factors: &Factors,
    emotion: Emotion,
) -> [f64; AppraisalVariable::COUNT] {
    AppraisalVariable::ALL.map(|v| match association_weight(model, emotion, v, factors) {
        Ok(w) => contribution(appraisal.value(v), w),
        Err(_) => 0.0,
    })
}

/// Signed intensity potentials before thresholding.
pub fn raw_intensities(
    appraisal: &AppraisalVector,
    model: &WeightModel,
    factors: &Factors,
) -> EmotionMap<f64> {
    use AppraisalVariable::*;
    EmotionMap::from_fn(|e| {
        let c = contributions(appraisal, model, factors, e);
        let c = |v: AppraisalVariable| c[v.index()];
        let praise = || signed_power(c(Praiseworthiness), 1.0 - c(Unexpectedness));
        match e {
            Emotion::Joy | Emotion::Distress => c(Desirability),
            Emotion::HappyFor | Emotion::SorryFor => c(Desirability) + c(Deservingness),
            Emotion::Appreciation | Emotion::Reproach => praise(),
            Emotion::Gratitude | Emotion::Anger => c(Desirability) + praise(),
            Emotion::Liking | Emotion::Disliking => signed_power(c(Appealingness), c(Familiarity)),
        }
    })
}

pub fn apply_threshold(raw: f64, spec: &EmotionSpec) -> f64 {
    (raw - spec.threshold).max(0.0)
}

pub fn effective_intensities(raw: &EmotionMap<f64>, table: &EmotionTable) -> EmotionMap<f64> {
    raw.map(|e, &r| apply_threshold(r, table.get(e)))
}

/// Linear personality-to-mood coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MoodCoefficients {
    pub openness: f64,
    pub conscientiousness: f64,
    pub extraversion: f64,
    pub agreeableness: f64,
    /// Subtracted.
    pub neuroticism: f64,
    /// Subtracted.
    pub offset: f64,
}

impl Default for MoodCoefficients {
    fn default() -> Self {
        MoodCoefficients {
            openness: 0.1,
            conscientiousness: 0.1,
            extraversion: 0.4,
            agreeableness: 0.2,
            neuroticism: 0.6,
            offset: 0.2,
        }
    }
}

pub fn mood_initial(p: &PersonalityProfile, k: &MoodCoefficients) -> MoodState {
    MoodState::new(
        k.openness * p.openness
            + k.conscientiousness * p.conscientiousness
            + k.extraversion * p.extraversion
            + k.agreeableness * p.agreeableness
            - k.neuroticism * p.neuroticism
            - k.offset,
    )
}

/// `+alpha |M|` for mood-congruent emotions, `-alpha |M|` otherwise.
pub fn mood_compensation(spec: &EmotionSpec, mood: MoodState, alpha: f64) -> f64 {
    let m = mood.value();
    let delta = (alpha * m).abs();
    if m != 0.0 && spec.valence_degree.signum() == m.signum() {
        delta
    } else {
        -delta
    }
}

pub fn apply_mood_compensation(
    intensities: &EmotionMap<f64>,
    table: &EmotionTable,
    mood: MoodState,
    alpha: f64,
) -> EmotionMap<f64> {
    intensities.map(|e, &i| (i + mood_compensation(table.get(e), mood, alpha)).max(0.0))
}

/// Signed sum of the intensities congruent with the event's impact.
pub fn aggregate_intensity(intensities: &EmotionMap<f64>, table: &EmotionTable, impact: f64) -> f64 {
    let positive = impact > 0.0;
    let sum: f64 = intensities
        .iter()
        .filter(|(e, _)| table.get(*e).is_positive() == positive)
        .map(|(_, &i)| i)
        .sum();
    if positive {
        sum
    } else {
        -sum
    }
}

pub fn mood_factor(aggregate: f64) -> f64 {
    2.0 / (1.0 + (-aggregate).exp()) - 1.0
}

pub fn update_mood(mood: MoodState, factor: f64, beta: f64) -> MoodState {
    MoodState::new(mood.value() + beta * factor)
}

/// `1 - e^t / e^T`, or 0 once `t >= T`.
///
/// For `T - t` beyond ~37 the exact value rounds to 1.0; it is kept at the
/// largest double below 1 so a live emotion always loses something.
pub fn decay_factor(t: f64, decay_time: f64) -> f64 {
    if t >= decay_time {
        0.0
    } else {
        (1.0 - (t - decay_time).exp()).min(1.0 - f64::EPSILON / 2.0)
    }
}

pub fn decay_step(intensity: f64, t: f64, decay_time: f64) -> f64 {
    intensity * decay_factor(t, decay_time)
}

pub fn normalize_intensity(raw: f64) -> f64 {
    LogisticParams::UNIT.apply(raw)
}
