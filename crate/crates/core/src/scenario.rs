//! Scenario files: a personality, starting memory and a timed event list.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{EngineConfig, Resources};
use crate::elicitation::{ActionScoreTable, DEFAULT_CONTEXT};
use crate::engine::{Engine, EventInput};
use crate::error::{read_file, toml_error, Error, Result};
use crate::memory::Memory;
use crate::trace::TraceEntry;
use crate::types::PersonalityProfile;

fn default_context() -> String {
    DEFAULT_CONTEXT.to_string()
}

fn neutral() -> PersonalityProfile {
    PersonalityProfile::neutral()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEvent {
    pub tick: u64,
    pub source: String,
    pub action: String,
    pub target: String,
}

impl ScenarioEvent {
    pub fn input(&self) -> EventInput {
        EventInput::new(&self.source, &self.action, &self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_context")]
    pub context: String,
    #[serde(default = "neutral")]
    pub personality: PersonalityProfile,
    #[serde(default)]
    pub memory: Memory,
    #[serde(default)]
    pub events: Vec<ScenarioEvent>,
    /// Keep ticking until this tick after the last event.
    #[serde(default)]
    pub end_tick: Option<u64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            context: default_context(),
            personality: neutral(),
            memory: Memory::default(),
            events: Vec::new(),
            end_tick: None,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| toml_error(text, file, &e))?;
        s.personality.validate()?;
        s.memory.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    /// Checks tick order and that every action is scored in the context.
    pub fn validate(&self, actions: &ActionScoreTable) -> Result<()> {
        let mut last = 0;
        for (i, e) in self.events.iter().enumerate() {
            let n = i + 1;
            if e.tick < last {
                return Err(Error::invalid(
                    "scenario",
                    format!("event {n}: tick {} precedes tick {last}", e.tick),
                ));
            }
            last = e.tick;
            if e.source.is_empty() || e.target.is_empty() {
                return Err(Error::invalid("scenario", format!("event {n}: empty source or target")));
            }
            if !actions.contains(&self.context, &e.action) {
                return Err(Error::invalid(
                    "scenario",
                    format!(
                        "event {n}: unscored action `{}` in context `{}`",
                        e.action, self.context
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn engine(&self, config: EngineConfig, resources: Resources) -> Result<Engine> {
        self.validate(&resources.actions)?;
        Engine::new(config, resources, self.personality, self.memory.clone(), &self.context)
    }

    /// Validates, then drives the whole scenario through a fresh engine.
    pub fn run(&self, config: EngineConfig, resources: Resources) -> Result<(Engine, Vec<TraceEntry>)> {
        let mut engine = self.engine(config, resources)?;
        let trace = self.drive(&mut engine);
        Ok((engine, trace))
    }

    /// Feeds the events into `engine`, ticking up to each event's time.
    pub fn drive(&self, engine: &mut Engine) -> Vec<TraceEntry> {
        let mut trace = Vec::new();
        for e in &self.events {
            trace.extend(engine.advance_to(e.tick));
            trace.push(engine.process_event(&e.input()));
        }
        if let Some(end) = self.end_tick {
            trace.extend(engine.advance_to(end));
        }
        trace
    }
}
