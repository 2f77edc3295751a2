//! Engine configuration and the tables it points at.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::affect::{CompensationOrder, MoodCoefficients, WeightModel};
use crate::appraisal::{LogisticParams, Normalization};
use crate::elicitation::ActionScoreTable;
use crate::emotion::EmotionTable;
use crate::error::{read_file, toml_error, Error, Result};
use crate::memory::MemoryParams;
use crate::regulation::Strategy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    /// Mood compensation strength.
    pub alpha: f64,
    /// Mood update rate.
    pub beta: f64,
    pub tick_seconds: f64,
    pub strategy: Strategy,
    /// Logistic parameters for out-of-range appraisals.
    pub appraisal_normalization: Normalization,
    /// Logistic parameters for published intensities.
    pub intensity_normalization: LogisticParams,
    pub compensation_order: CompensationOrder,
    pub memory: MemoryParams,
    pub mood: MoodCoefficients,
    /// Wall-clock time of tick 0, used to timestamp events.
    pub start_time: DateTime<Utc>,
    pub actions: Option<PathBuf>,
    pub emotions: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            alpha: 0.1,
            beta: 0.1,
            tick_seconds: 1.0,
            strategy: Strategy::default(),
            appraisal_normalization: Normalization::default(),
            intensity_normalization: LogisticParams::UNIT,
            compensation_order: CompensationOrder::default(),
            memory: MemoryParams::default(),
            mood: MoodCoefficients::default(),
            start_time: DateTime::UNIX_EPOCH,
            actions: None,
            emotions: None,
            weights: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid("config", format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("beta", self.beta)?;
        if !(self.tick_seconds > 0.0 && self.tick_seconds.is_finite()) {
            return Err(Error::invalid(
                "config",
                format!("tick_seconds = {} must be positive", self.tick_seconds),
            ));
        }
        self.appraisal_normalization.unit.validate()?;
        self.appraisal_normalization.signed.validate()?;
        self.intensity_normalization.validate()?;
        self.memory.validate()
    }

    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let config: EngineConfig = toml::from_str(text).map_err(|e| toml_error(text, file, &e))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a TOML config; relative table paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::parse(&read_file(path)?, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.actions, &mut config.emotions, &mut config.weights]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn resources(&self) -> Result<Resources> {
        Ok(Resources {
            actions: match &self.actions {
                Some(p) => ActionScoreTable::load(p)?,
                None => ActionScoreTable::shipped(),
            },
            emotions: match &self.emotions {
                Some(p) => EmotionTable::load(p)?,
                None => EmotionTable::shipped(),
            },
            weights: match &self.weights {
                Some(p) => WeightModel::load(p)?,
                None => WeightModel::occ_default(),
            },
        })
    }
}

/// Tables loaded once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resources {
    pub actions: ActionScoreTable,
    pub emotions: EmotionTable,
    pub weights: WeightModel,
}

impl Default for Resources {
    fn default() -> Self {
        EngineConfig::default().resources().expect("shipped tables are valid")
    }
}
