//! The per-event pipeline and the tick clock.

use std::path::Path;

use chrono::Duration;
use serde::{Deserialize, Serialize};

use crate::affect::{
    aggregate_intensity, effective_intensities, mood_factor, mood_initial, raw_intensities, update_mood,
    AffectState, Factors,
};
use crate::appraisal::appraise_with;
use crate::config::{EngineConfig, Resources};
use crate::elicitation::DEFAULT_CONTEXT;
use crate::emotion::Emotion;
use crate::error::{read_file, write_file, Error, Result};
use crate::memory::Memory;
use crate::regulation::{regulate, RegulationOutcome};
use crate::trace::{EntryKind, TraceEntry};
use crate::types::{EntityId, EventRecord, MoodState, PersonalityProfile};

const SNAPSHOT_VERSION: u32 = 1;

/// An event as submitted: who did which named action to whom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventInput {
    pub source: String,
    pub action: String,
    pub target: String,
}

impl EventInput {
    pub fn new(source: &str, action: &str, target: &str) -> Self {
        EventInput {
            source: source.into(),
            action: action.into(),
            target: target.into(),
        }
    }
}

/// Everything that changes as the agent lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentState {
    pub clock: u64,
    pub context: String,
    pub personality: PersonalityProfile,
    /// The entity the agent last interacted with.
    pub interlocutor: Option<EntityId>,
    pub affect: AffectState,
    pub memory: Memory,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    version: u32,
    config_hash: String,
    #[serde(flatten)]
    state: AgentState,
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    config_hash: String,
    resources: Resources,
    state: AgentState,
}

impl Engine {
    pub fn new(
        config: EngineConfig,
        resources: Resources,
        personality: PersonalityProfile,
        memory: Memory,
        context: &str,
    ) -> Result<Self> {
        config.validate()?;
        personality.validate()?;
        memory.validate()?;
        let mood = mood_initial(&personality, &config.mood);
        Ok(Engine {
            config_hash: config.hash(),
            state: AgentState {
                clock: 0,
                context: context.to_string(),
                personality,
                interlocutor: None,
                affect: AffectState::new(mood),
                memory,
            },
            config,
            resources,
        })
    }

    /// A fresh agent with shipped tables, neutral personality and empty memory.
    pub fn with_defaults() -> Self {
        Self::new(
            EngineConfig::default(),
            Resources::default(),
            PersonalityProfile::neutral(),
            Memory::default(),
            DEFAULT_CONTEXT,
        )
        .expect("defaults are valid")
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn clock(&self) -> u64 {
        self.state.clock
    }

    pub fn mood(&self) -> MoodState {
        self.state.affect.mood
    }

    pub fn memory(&self) -> &Memory {
        &self.state.memory
    }

    pub fn affect(&self) -> &AffectState {
        &self.state.affect
    }

    fn timestamp(&self) -> chrono::DateTime<chrono::Utc> {
        let ms = (self.state.clock as f64 * self.config.tick_seconds * 1000.0).round() as i64;
        self.config.start_time + Duration::milliseconds(ms)
    }

    fn regulate_now(&self) -> RegulationOutcome {
        let active: Vec<(Emotion, f64)> = self.state.affect.active().collect();
        let target = self.state.interlocutor.clone().unwrap_or_else(EntityId::self_id);
        regulate(
            self.config.strategy,
            &active,
            &self.resources.emotions,
            &target,
            &self.state.memory.standards,
        )
    }

    fn rejected(&self, input: &EventInput, err: &Error) -> TraceEntry {
        let mood = self.mood().value();
        TraceEntry {
            kind: EntryKind::Rejected,
            tick: self.state.clock,
            source: Some(input.source.clone()),
            action: Some(input.action.clone()),
            target: Some(input.target.clone()),
            degree: None,
            appraisal: None,
            raw: None,
            intensities: self.state.affect.intensities,
            mood_before: mood,
            mood_after: mood,
            outcome: None,
            error: Some(err.to_string()),
        }
    }

    /// Runs elicitation, appraisal, affect generation and regulation for one
    /// event at the current tick, then folds the event into memory.
    ///
    /// An event that cannot be scored or recorded leaves the state untouched
    /// and yields a `rejected` entry.
    pub fn process_event(&mut self, input: &EventInput) -> TraceEntry {
        match self.try_process(input) {
            Ok(entry) => entry,
            Err(e) => {
                log::warn!("rejected event {} {} {}: {e}", input.source, input.action, input.target);
                self.rejected(input, &e)
            }
        }
    }

    fn try_process(&mut self, input: &EventInput) -> Result<TraceEntry> {
        let action = self.resources.actions.action(&self.state.context, &input.action)?;
        let d_e = action.degree;
        let mut event = EventRecord::new(
            input.source.as_str().into(),
            action,
            input.target.as_str().into(),
            self.timestamp(),
        )?;

        let state = &self.state;
        let appraisal = appraise_with(&event, &state.memory, d_e, &self.config.appraisal_normalization)?;
        let mood_before = state.affect.mood;
        let factors = Factors::new(&state.personality, mood_before);
        let raw = raw_intensities(&appraisal, &self.resources.weights, &factors);
        let effective = effective_intensities(&raw, &self.resources.emotions);

        // Memory is updated last; stage the new memory before touching affect
        // so a failure leaves the agent unchanged.
        let source = state.memory.entities.profile(&event.source);
        let impact = if appraisal.desirability > 0.0 {
            1.0
        } else if appraisal.desirability < 0.0 {
            -1.0
        } else {
            0.0
        };
        event.other_info.insert("perception".into(), source.perception);
        event.other_info.insert("familiarity".into(), source.familiarity);
        event.other_info.insert("impact".into(), impact);
        let mut memory = state.memory.clone();
        memory.update_after_event(&event, &self.config.memory, &self.resources.emotions)?;

        let clock = state.clock;
        let affect = &mut self.state.affect;
        affect.stimulate(
            &effective,
            &self.resources.emotions,
            self.config.alpha,
            self.config.compensation_order,
            &self.config.intensity_normalization,
            clock,
        );
        let aggregate = aggregate_intensity(&affect.intensities, &self.resources.emotions, impact);
        affect.mood = update_mood(mood_before, mood_factor(aggregate), self.config.beta);

        self.state.interlocutor = Some(if event.source.is_self() {
            event.target.clone()
        } else {
            event.source.clone()
        });
        let outcome = self.regulate_now();
        self.state.memory = memory;

        Ok(TraceEntry {
            kind: EntryKind::Event,
            tick: clock,
            source: Some(input.source.clone()),
            action: Some(input.action.clone()),
            target: Some(input.target.clone()),
            degree: Some(d_e),
            appraisal: Some(appraisal),
            raw: Some(raw),
            intensities: self.state.affect.intensities,
            mood_before: mood_before.value(),
            mood_after: self.state.affect.mood.value(),
            outcome: Some(outcome),
            error: None,
        })
    }

    /// Advances the clock one tick and decays every live emotion.
    pub fn tick(&mut self) -> TraceEntry {
        self.state.clock += 1;
        let mood = self.mood().value();
        self.state.affect.decay(
            self.state.clock,
            self.config.tick_seconds,
            &self.resources.emotions,
            &self.config.intensity_normalization,
        );
        TraceEntry {
            kind: EntryKind::Tick,
            tick: self.state.clock,
            source: None,
            action: None,
            target: None,
            degree: None,
            appraisal: None,
            raw: None,
            intensities: self.state.affect.intensities,
            mood_before: mood,
            mood_after: mood,
            outcome: Some(self.regulate_now()),
            error: None,
        }
    }

    /// Ticks until the clock reads `tick`; no-op if already there or past.
    pub fn advance_to(&mut self, tick: u64) -> Vec<TraceEntry> {
        let mut out = Vec::new();
        while self.state.clock < tick {
            out.push(self.tick());
        }
        out
    }

    pub fn snapshot_json(&self) -> String {
        let snap = Snapshot {
            version: SNAPSHOT_VERSION,
            config_hash: self.config_hash.clone(),
            state: self.state.clone(),
        };
        serde_json::to_string_pretty(&snap).expect("state serializes") + "\n"
    }

    /// Replaces the agent state from a snapshot.
    ///
    /// An empty snapshot yields a fresh agent with the current personality.
    /// A snapshot written under a different config is refused unless
    /// `allow_config_mismatch` is set.
    pub fn restore_json(&mut self, text: &str, file: &str, allow_config_mismatch: bool) -> Result<()> {
        if text.trim().is_empty() {
            let personality = self.state.personality;
            self.state = AgentState {
                clock: 0,
                context: self.state.context.clone(),
                personality,
                interlocutor: None,
                affect: AffectState::new(mood_initial(&personality, &self.config.mood)),
                memory: Memory::default(),
            };
            return Ok(());
        }
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(file, e.line(), e.to_string()))?;
        let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != SNAPSHOT_VERSION {
            return Err(Error::Version {
                what: "state snapshot",
                found: version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let snap: Snapshot =
            serde_json::from_value(value).map_err(|e| Error::parse(file, 0, e.to_string()))?;
        if snap.config_hash != self.config_hash {
            if !allow_config_mismatch {
                return Err(Error::ConfigMismatch {
                    expected: self.config_hash.clone(),
                    found: snap.config_hash,
                });
            }
            log::warn!("{file} was saved under config {}; loading anyway", snap.config_hash);
        }
        snap.state.personality.validate()?;
        snap.state.memory.validate()?;
        if !snap.state.affect.in_range() {
            return Err(Error::invalid("state snapshot", "intensity or mood out of range"));
        }
        self.state = snap.state;
        Ok(())
    }

    pub fn save_state(&self, path: &Path) -> Result<()> {
        write_file(path, self.snapshot_json().as_bytes())
    }

    pub fn load_state(&mut self, path: &Path, allow_config_mismatch: bool) -> Result<()> {
        let text = read_file(path)?;
        self.restore_json(&text, &path.display().to_string(), allow_config_mismatch)
    }
}
