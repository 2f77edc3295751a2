//! Per-emotion intensity accumulation, mood and decay across ticks.
//!
//! Each emotion keeps an unbounded accumulator. Events add their effective
//! intensity plus the mood compensation, the sum is clipped at 0 and the
//! published intensity is its logistic image. An accumulator of exactly 0
//! publishes 0, so untouched emotions stay inactive.

use serde::{Deserialize, Serialize};

use super::{decay_factor, mood_compensation};
use crate::appraisal::LogisticParams;
use crate::emotion::{Emotion, EmotionMap, EmotionTable};
use crate::types::MoodState;

/// Where mood compensation enters relative to intensity normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompensationOrder {
    /// Compensate the accumulator, clip at 0, then normalize.
    #[default]
    BeforeNormalization,
    /// Normalize first, then compensate the published value.
    AfterNormalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Track {
    pub accumulator: f64,
    /// Accumulator value when the emotion was last stimulated.
    pub peak: f64,
    pub last_stimulus_tick: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffectState {
    pub intensities: EmotionMap<f64>,
    pub mood: MoodState,
    pub tracks: EmotionMap<Track>,
}

fn publish(acc: f64, norm: &LogisticParams) -> f64 {
    if acc == 0.0 {
        0.0
    } else {
        norm.apply(acc)
    }
}

impl AffectState {
    pub fn new(mood: MoodState) -> Self {
        AffectState {
            intensities: EmotionMap::filled(0.0),
            mood,
            tracks: EmotionMap::default(),
        }
    }

    pub fn intensity(&self, e: Emotion) -> f64 {
        self.intensities[e]
    }

    pub fn active(&self) -> impl Iterator<Item = (Emotion, f64)> + '_ {
        self.intensities
            .iter()
            .filter(|(_, &i)| i > 0.0)
            .map(|(e, &i)| (e, i))
    }

    /// Folds one event's effective intensities into the state at `tick`.
    pub fn stimulate(
        &mut self,
        effective: &EmotionMap<f64>,
        table: &EmotionTable,
        alpha: f64,
        order: CompensationOrder,
        norm: &LogisticParams,
        tick: u64,
    ) {
        for e in Emotion::ALL {
            let comp = mood_compensation(table.get(e), self.mood, alpha);
            let track = &mut self.tracks[e];
            let summed = track.accumulator + effective[e];
            let (acc, published) = match order {
                CompensationOrder::BeforeNormalization => {
                    let acc = (summed + comp).max(0.0);
                    (acc, publish(acc, norm))
                }
                CompensationOrder::AfterNormalization => {
                    // Largest value strictly below the logistic's upper asymptote.
                    let ceiling = norm.gap + norm.offset - f64::EPSILON;
                    let p = (publish(summed, norm) + comp).min(ceiling);
                    if p <= norm.apply(0.0) {
                        (0.0, 0.0)
                    } else {
                        (norm.invert(p), p)
                    }
                }
            };
            if acc != track.accumulator {
                track.accumulator = acc;
                track.peak = acc;
                track.last_stimulus_tick = tick;
            }
            self.intensities[e] = published;
        }
    }

    /// Decays every live emotion to its value at `tick`.
    pub fn decay(&mut self, tick: u64, tick_seconds: f64, table: &EmotionTable, norm: &LogisticParams) {
        for e in Emotion::ALL {
            let track = &mut self.tracks[e];
            if track.accumulator <= 0.0 {
                continue;
            }
            let t = tick.saturating_sub(track.last_stimulus_tick) as f64 * tick_seconds;
            let acc = track.peak * decay_factor(t, table.get(e).decay_time_s);
            track.accumulator = acc;
            if acc == 0.0 {
                track.peak = 0.0;
            }
            let published = publish(acc, norm);
            // Never let rounding lift a decaying emotion.
            self.intensities[e] = published.min(self.intensities[e]);
        }
    }

    pub fn in_range(&self) -> bool {
        self.intensities.values().all(|i| (0.0..=1.0).contains(i))
            && (-1.0..=1.0).contains(&self.mood.value())
    }
}
