//! Appraisal-driven emotion engine.
//!
//! Events are scored, appraised against the agent's goals, standards and
//! attitudes, mapped to ten emotion intensities through a personality and
//! mood weighted network, and finally regulated down to one emotional state.

pub mod affect;
pub mod appraisal;
pub mod config;
pub mod elicitation;
pub mod emotion;
pub mod engine;
pub mod error;
pub mod memory;
pub mod regulation;
pub mod scenario;
pub mod trace;
pub mod types;

pub use emotion::{valence_degree, Emotion, EmotionMap, EmotionSpec, EmotionTable};
pub use error::{Error, Result};
pub use types::{ActionSpec, EntityId, EntityProfile, EventRecord, MoodState, PersonalityProfile, Valence};
