//! Stimulus-world records: entities, actions, events, personality and mood.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a person or object the agent knows about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    /// The agent itself.
    pub const SELF_NAME: &'static str = "SELF";

    pub fn new(name: impl Into<String>) -> Self {
        EntityId(name.into())
    }

    pub fn self_id() -> Self {
        EntityId(Self::SELF_NAME.to_string())
    }

    pub fn is_self(&self) -> bool {
        self.0 == Self::SELF_NAME
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "POSITIVE" | "POS" | "+" => Some(Valence::Positive),
            "NEGATIVE" | "NEG" | "-" => Some(Valence::Negative),
            _ => None,
        }
    }

    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Valence::Negative
        } else {
            Valence::Positive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Valence::Positive => "POSITIVE",
            Valence::Negative => "NEGATIVE",
        }
    }
}

/// `(name, valence, degree)`. A zero degree is valence-neutral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub name: String,
    pub valence: Valence,
    pub degree: f64,
}

impl ActionSpec {
    pub fn new(name: impl Into<String>, valence: Valence, degree: f64) -> Result<Self> {
        let name = name.into();
        if !degree.is_finite() || degree.abs() > 1.0 {
            return Err(Error::invalid(
                "action",
                format!("degree {degree} of `{name}` outside [-1, 1]"),
            ));
        }
        if degree != 0.0 && Valence::of(degree) != valence {
            return Err(Error::invalid(
                "action",
                format!(
                    "degree {degree} of `{name}` contradicts valence {}",
                    valence.as_str()
                ),
            ));
        }
        Ok(ActionSpec {
            name,
            valence,
            degree,
        })
    }
}

/// `(source, action, target, timestamp, other_info)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub source: EntityId,
    pub action: ActionSpec,
    pub target: EntityId,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub other_info: BTreeMap<String, f64>,
}

impl EventRecord {
    pub fn new(
        source: EntityId,
        action: ActionSpec,
        target: EntityId,
        timestamp: DateTime<Utc>,
    ) -> Result<Self> {
        if source.as_str().is_empty() || target.as_str().is_empty() {
            return Err(Error::invalid("event", "source and target must be non-empty"));
        }
        Ok(EventRecord {
            source,
            action,
            target,
            timestamp,
            other_info: BTreeMap::new(),
        })
    }

    pub fn degree(&self) -> f64 {
        self.action.degree
    }
}

/// What the agent knows about another entity.
///
/// `familiarity` is a relationship distance: 1.0 is a complete stranger,
/// 0.0 is fully familiar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityProfile {
    pub name: EntityId,
    pub familiarity: f64,
    pub perception: f64,
}

impl EntityProfile {
    pub fn stranger(name: EntityId) -> Self {
        EntityProfile {
            name,
            familiarity: 1.0,
            perception: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.familiarity) {
            return Err(Error::invalid(
                "entity",
                format!("familiarity {} of {} outside [0, 1]", self.familiarity, self.name),
            ));
        }
        if !(-1.0..=1.0).contains(&self.perception) {
            return Err(Error::invalid(
                "entity",
                format!("perception {} of {} outside [-1, 1]", self.perception, self.name),
            ));
        }
        Ok(())
    }
}

/// Five-factor personality traits, each in `[0, 1]`. Fixed for an agent's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonalityProfile {
    #[serde(rename = "O")]
    pub openness: f64,
    #[serde(rename = "C")]
    pub conscientiousness: f64,
    #[serde(rename = "E")]
    pub extraversion: f64,
    #[serde(rename = "A")]
    pub agreeableness: f64,
    #[serde(rename = "N")]
    pub neuroticism: f64,
}

impl PersonalityProfile {
    pub fn new(o: f64, c: f64, e: f64, a: f64, n: f64) -> Result<Self> {
        let p = PersonalityProfile {
            openness: o,
            conscientiousness: c,
            extraversion: e,
            agreeableness: a,
            neuroticism: n,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn neutral() -> Self {
        PersonalityProfile {
            openness: 0.5,
            conscientiousness: 0.5,
            extraversion: 0.5,
            agreeableness: 0.5,
            neuroticism: 0.5,
        }
    }

    pub fn traits(&self) -> [f64; 5] {
        [
            self.openness,
            self.conscientiousness,
            self.extraversion,
            self.agreeableness,
            self.neuroticism,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in ["O", "C", "E", "A", "N"].iter().zip(self.traits()) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(
                    "personality",
                    format!("trait {name} = {v} outside [0, 1]"),
                ));
            }
        }
        Ok(())
    }
}

/// Scalar mood, always within `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoodState(f64);

impl MoodState {
    pub fn new(value: f64) -> Self {
        MoodState(value.clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for MoodState {
    fn default() -> Self {
        MoodState(0.0)
    }
}
