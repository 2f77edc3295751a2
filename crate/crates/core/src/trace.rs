//! Trace records and their CSV / JSON Lines encodings.
//!
//! CSV columns, in order:
//!
//! `kind, tick, source, action, target, degree`, the six scalar appraisals
//! (`desirability` .. `unexpectedness`), `raw_<emotion>` for the ten
//! pre-threshold potentials, `<emotion>` for the ten published intensities,
//! `mood_before, mood_after, strategy, label, regulated_emotion,
//! regulated_intensity, error`. Fields that do not apply to a row are empty.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::appraisal::{AppraisalVariable, AppraisalVector};
use crate::emotion::{Emotion, EmotionMap};
use crate::regulation::RegulationOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Event,
    Tick,
    Rejected,
}

impl EntryKind {
    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Event => "event",
            EntryKind::Tick => "tick",
            EntryKind::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub kind: EntryKind,
    pub tick: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub appraisal: Option<AppraisalVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<EmotionMap<f64>>,
    pub intensities: EmotionMap<f64>,
    pub mood_before: f64,
    pub mood_after: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<RegulationOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

const SCALARS: [AppraisalVariable; 6] = [
    AppraisalVariable::Desirability,
    AppraisalVariable::Praiseworthiness,
    AppraisalVariable::Appealingness,
    AppraisalVariable::Deservingness,
    AppraisalVariable::Familiarity,
    AppraisalVariable::Unexpectedness,
];

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = ["kind", "tick", "source", "action", "target", "degree"]
        .map(String::from)
        .to_vec();
    h.extend(SCALARS.iter().map(|v| v.name().to_string()));
    h.extend(Emotion::ALL.iter().map(|e| format!("raw_{e}")));
    h.extend(Emotion::ALL.iter().map(|e| e.name().to_string()));
    h.extend(
        [
            "mood_before",
            "mood_after",
            "strategy",
            "label",
            "regulated_emotion",
            "regulated_intensity",
            "error",
        ]
        .map(String::from),
    );
    h
}

impl TraceEntry {
    pub fn csv_row(&self) -> Vec<String> {
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let text = |v: &Option<String>| v.clone().unwrap_or_default();
        let mut row = vec![
            self.kind.name().to_string(),
            self.tick.to_string(),
            text(&self.source),
            text(&self.action),
            text(&self.target),
            num(self.degree),
        ];
        row.extend(SCALARS.iter().map(|&v| num(self.appraisal.as_ref().map(|a| a.value(v)))));
        row.extend(Emotion::ALL.iter().map(|&e| num(self.raw.as_ref().map(|r| r[e]))));
        row.extend(Emotion::ALL.iter().map(|&e| self.intensities[e].to_string()));
        row.push(self.mood_before.to_string());
        row.push(self.mood_after.to_string());
        match &self.outcome {
            Some(o) => {
                row.push(o.strategy.name().to_string());
                row.push(o.label.clone());
                row.push(o.emotion.map(|e| e.name().to_string()).unwrap_or_default());
                row.push(o.intensity.to_string());
            }
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        row.push(text(&self.error));
        row
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Csv,
    Jsonl,
}

/// Writes a complete trace. An empty trace in CSV form is just the header.
pub fn write_trace(out: impl Write, entries: &[TraceEntry], format: TraceFormat) -> std::io::Result<()> {
    match format {
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(csv_header())?;
            for e in entries {
                w.write_record(e.csv_row())?;
            }
            w.flush()
        }
        TraceFormat::Jsonl => {
            let mut out = out;
            for e in entries {
                serde_json::to_writer(&mut out, e)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

pub fn trace_to_string(entries: &[TraceEntry], format: TraceFormat) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, entries, format).expect("writing to memory");
    String::from_utf8(buf).expect("trace is utf-8")
}
