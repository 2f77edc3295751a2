//! Agent memory: goals, standards, attitudes and the event history.
//!
//! Goals drive desirability, standards drive praiseworthiness and the ethical
//! regulation step, attitudes (entity profiles) drive appealingness and
//! familiarity, and the history feeds deservingness and unexpectedness.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emotion::{Emotion, EmotionTable};
use crate::error::{read_file, write_file, Error, Result};
use crate::types::{EntityId, EntityProfile, EventRecord, Valence};

const MEMORY_FILE_VERSION: u32 = 1;

/// Approval degree given to standards created on first contact.
pub const NEUTRAL_APPROVAL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GoalKind {
    /// Active-pursuit goal.
    A,
    /// Interest goal.
    I,
    /// Replenishment goal.
    #[default]
    R,
}

/// A scorable `(action/emotion, target)` goal with its signed degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalNode {
    pub subject: String,
    #[serde(default)]
    pub target: Option<EntityId>,
    pub degree: f64,
    #[serde(default)]
    pub kind: GoalKind,
    #[serde(default)]
    pub children: Vec<GoalNode>,
}

impl GoalNode {
    pub fn new(subject: impl Into<String>, target: Option<EntityId>, degree: f64) -> Self {
        GoalNode {
            subject: subject.into(),
            target,
            degree,
            kind: GoalKind::R,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<GoalNode>) -> Self {
        self.children = children;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.degree) {
            return Err(Error::invalid(
                "goal",
                format!("degree {} of goal `{}` outside [-1, 1]", self.degree, self.subject),
            ));
        }
        if self.subject.is_empty() {
            return Err(Error::invalid("goal", "goal subject must be non-empty"));
        }
        self.children.iter().try_for_each(GoalNode::validate)
    }
}

/// The goal hierarchy below `(Root, NULL)`.
///
/// The root and its two category children `(Self_goal, NULL)` and
/// `(Other_goal, NULL)` are implicit and never scored. Category nodes sit at
/// height 1, so every stored node has height >= 2.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalTree {
    #[serde(default)]
    pub self_goals: Vec<GoalNode>,
    #[serde(default)]
    pub other_goals: Vec<GoalNode>,
}

/// A goal matched against an event, with its edge distance from the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelevantGoal<'a> {
    pub node: &'a GoalNode,
    pub height: u32,
}

impl GoalTree {
    pub fn validate(&self) -> Result<()> {
        self.self_goals
            .iter()
            .chain(&self.other_goals)
            .try_for_each(GoalNode::validate)
    }

    /// Goals whose target is the event's target, in pre-order (self goals first).
    pub fn relevant_goals(&self, event: &EventRecord) -> Vec<RelevantGoal<'_>> {
        fn walk<'a>(node: &'a GoalNode, height: u32, target: &EntityId, out: &mut Vec<RelevantGoal<'a>>) {
            if node.target.as_ref() == Some(target) {
                out.push(RelevantGoal { node, height });
            }
            for child in &node.children {
                walk(child, height + 1, target, out);
            }
        }

        let mut out = Vec::new();
        for node in self.self_goals.iter().chain(&self.other_goals) {
            walk(node, 2, &event.target, &mut out);
        }
        out
    }

    pub fn len(&self) -> usize {
        fn count(n: &GoalNode) -> usize {
            1 + n.children.iter().map(count).sum::<usize>()
        }
        self.self_goals.iter().chain(&self.other_goals).map(count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.self_goals.is_empty() && self.other_goals.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Preference {
    Yes,
    No,
}

impl Preference {
    pub fn sign(self) -> f64 {
        match self {
            Preference::Yes => 1.0,
            Preference::No => -1.0,
        }
    }
}

/// `(action/emotion, source, target, (preference, approval degree))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardEntry {
    pub subject: String,
    pub source: EntityId,
    pub target: EntityId,
    pub preference: Preference,
    pub approval_degree: f64,
}

impl StandardEntry {
    pub fn neutral(subject: &str, source: &EntityId, target: &EntityId) -> Self {
        StandardEntry {
            subject: subject.to_string(),
            source: source.clone(),
            target: target.clone(),
            preference: Preference::Yes,
            approval_degree: NEUTRAL_APPROVAL,
        }
    }

    /// `+d_a` for YES, `-d_a` for NO.
    pub fn signed_approval(&self) -> f64 {
        self.preference.sign() * self.approval_degree
    }

    fn key(&self) -> StandardKey {
        StandardKey {
            subject: self.subject.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct StandardKey {
    // Field order sets the iteration order: target first for CoS scans.
    target: EntityId,
    subject: String,
    source: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Approval {
    preference: Preference,
    degree: f64,
}

/// At most one entry per `(subject, source, target)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<StandardEntry>", into = "Vec<StandardEntry>")]
pub struct Standards {
    entries: BTreeMap<StandardKey, Approval>,
}

impl Standards {
    pub fn insert(&mut self, entry: StandardEntry) -> Result<()> {
        if !(entry.approval_degree > 0.0 && entry.approval_degree <= 1.0) {
            return Err(Error::invalid(
                "standard",
                format!(
                    "approval degree {} of ({}, {}, {}) outside (0, 1]",
                    entry.approval_degree, entry.subject, entry.source, entry.target
                ),
            ));
        }
        self.entries.insert(
            entry.key(),
            Approval {
                preference: entry.preference,
                degree: entry.approval_degree,
            },
        );
        Ok(())
    }

    pub fn get(&self, subject: &str, source: &EntityId, target: &EntityId) -> Option<StandardEntry> {
        let key = StandardKey {
            subject: subject.to_string(),
            source: source.clone(),
            target: target.clone(),
        };
        self.entries.get(&key).map(|a| Self::entry(&key, a))
    }

    /// Stored entry, or the neutral one without recording it.
    pub fn get_or_neutral(&self, subject: &str, source: &EntityId, target: &EntityId) -> StandardEntry {
        self.get(subject, source, target)
            .unwrap_or_else(|| StandardEntry::neutral(subject, source, target))
    }

    /// Stored entry, creating a neutral `(YES, 0.5)` one on first lookup.
    pub fn lookup_standard(&mut self, subject: &str, source: &EntityId, target: &EntityId) -> StandardEntry {
        let key = StandardKey {
            subject: subject.to_string(),
            source: source.clone(),
            target: target.clone(),
        };
        let approval = *self.entries.entry(key.clone()).or_insert(Approval {
            preference: Preference::Yes,
            degree: NEUTRAL_APPROVAL,
        });
        Self::entry(&key, &approval)
    }

    /// Every standard about `subject` directed at `target`, whatever the source.
    pub fn about(&self, subject: &str, target: &EntityId) -> impl Iterator<Item = StandardEntry> + '_ {
        let subject = subject.to_string();
        let target = target.clone();
        self.entries
            .iter()
            .filter(move |(k, _)| k.target == target && k.subject == subject)
            .map(|(k, a)| Self::entry(k, a))
    }

    pub fn iter(&self) -> impl Iterator<Item = StandardEntry> + '_ {
        self.entries.iter().map(|(k, a)| Self::entry(k, a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn entry(key: &StandardKey, a: &Approval) -> StandardEntry {
        StandardEntry {
            subject: key.subject.clone(),
            source: key.source.clone(),
            target: key.target.clone(),
            preference: a.preference,
            approval_degree: a.degree,
        }
    }
}

impl TryFrom<Vec<StandardEntry>> for Standards {
    type Error = Error;

    fn try_from(entries: Vec<StandardEntry>) -> Result<Self> {
        let mut s = Standards::default();
        for e in entries {
            let key = e.key();
            if s.entries.contains_key(&key) {
                return Err(Error::invalid(
                    "standard",
                    format!("duplicate entry ({}, {}, {})", key.subject, key.source, key.target),
                ));
            }
            s.insert(e)?;
        }
        Ok(s)
    }
}

impl From<Standards> for Vec<StandardEntry> {
    fn from(s: Standards) -> Self {
        s.iter().collect()
    }
}

/// Attitudes and familiarity, one profile per known entity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<EntityProfile>", into = "Vec<EntityProfile>")]
pub struct Entities {
    profiles: BTreeMap<EntityId, EntityProfile>,
}

impl Entities {
    /// Stored profile, or a fresh stranger profile for unknown entities.
    pub fn profile(&self, id: &EntityId) -> EntityProfile {
        self.profiles
            .get(id)
            .cloned()
            .unwrap_or_else(|| EntityProfile::stranger(id.clone()))
    }

    pub fn perception(&self, id: &EntityId) -> f64 {
        self.profile(id).perception
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.profiles.contains_key(id)
    }

    pub fn insert(&mut self, profile: EntityProfile) -> Result<()> {
        profile.validate()?;
        self.profiles.insert(profile.name.clone(), profile);
        Ok(())
    }

    fn entry(&mut self, id: &EntityId) -> &mut EntityProfile {
        self.profiles
            .entry(id.clone())
            .or_insert_with(|| EntityProfile::stranger(id.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &EntityProfile> {
        self.profiles.values()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

impl TryFrom<Vec<EntityProfile>> for Entities {
    type Error = Error;

    fn try_from(v: Vec<EntityProfile>) -> Result<Self> {
        let mut e = Entities::default();
        for p in v {
            if e.contains(&p.name) {
                return Err(Error::invalid("entity", format!("duplicate entity {}", p.name)));
            }
            e.insert(p)?;
        }
        Ok(e)
    }
}

impl From<Entities> for Vec<EntityProfile> {
    fn from(e: Entities) -> Self {
        e.profiles.into_values().collect()
    }
}

/// Append-only, timestamp-ordered event log.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<EventRecord>", into = "Vec<EventRecord>")]
pub struct EventHistory {
    events: Vec<EventRecord>,
}

impl EventHistory {
    pub fn push(&mut self, event: EventRecord) -> Result<()> {
        if let Some(last) = self.events.last() {
            if event.timestamp < last.timestamp {
                return Err(Error::invalid(
                    "history",
                    format!("event at {} precedes last event at {}", event.timestamp, last.timestamp),
                ));
            }
        }
        self.events.push(event);
        Ok(())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EventRecord> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn between<'a>(
        &'a self,
        source: &'a EntityId,
        target: &'a EntityId,
    ) -> impl Iterator<Item = &'a EventRecord> + 'a {
        self.events
            .iter()
            .filter(move |e| &e.source == source && &e.target == target)
    }
}

impl TryFrom<Vec<EventRecord>> for EventHistory {
    type Error = Error;

    fn try_from(v: Vec<EventRecord>) -> Result<Self> {
        let mut h = EventHistory::default();
        v.into_iter().try_for_each(|e| h.push(e))?;
        Ok(h)
    }
}

impl From<EventHistory> for Vec<EventRecord> {
    fn from(h: EventHistory) -> Self {
        h.events
    }
}

/// Aggregated past action degrees from one entity to another.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PastImpacts {
    /// Sum of positive degrees, >= 0.
    pub positive: f64,
    /// Sum of negative degrees, <= 0.
    pub negative: f64,
}

impl PastImpacts {
    pub fn net(&self) -> f64 {
        self.positive + self.negative
    }
}

pub fn past_impacts(source: &EntityId, target: &EntityId, history: &EventHistory) -> PastImpacts {
    history
        .between(source, target)
        .fold(PastImpacts::default(), |mut acc, e| {
            let d = e.degree();
            if d > 0.0 {
                acc.positive += d;
            } else {
                acc.negative += d;
            }
            acc
        })
}

/// Mean action degree from `source` to `target`; 0 with no shared history.
pub fn average_past_degree(source: &EntityId, target: &EntityId, history: &EventHistory) -> f64 {
    let (sum, n) = history
        .between(source, target)
        .fold((0.0, 0usize), |(s, n), e| (s + e.degree(), n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Learning rates for the post-event memory update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemoryParams {
    /// EMA rate for perception updates.
    pub perception_rate: f64,
    /// Familiarity (distance) decrement per interaction.
    pub familiarity_step: f64,
    /// Rate at which self-standards for negative emotions follow experience.
    pub standard_rate: f64,
    /// Lower bound kept on approval degrees.
    pub min_approval: f64,
}

impl Default for MemoryParams {
    fn default() -> Self {
        MemoryParams {
            perception_rate: 0.2,
            familiarity_step: 0.1,
            standard_rate: 0.1,
            min_approval: 1e-6,
        }
    }
}

impl MemoryParams {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.perception_rate)
            && (0.0..=1.0).contains(&self.familiarity_step)
            && (0.0..=1.0).contains(&self.standard_rate)
            && self.min_approval > 0.0
            && self.min_approval <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("memory params", format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Memory {
    #[serde(default)]
    pub goals: GoalTree,
    #[serde(default)]
    pub standards: Standards,
    #[serde(default)]
    pub entities: Entities,
    #[serde(default)]
    pub history: EventHistory,
}

#[derive(Serialize, Deserialize)]
struct MemoryFile {
    version: u32,
    #[serde(flatten)]
    memory: Memory,
}

impl Memory {
    pub fn validate(&self) -> Result<()> {
        self.goals.validate()
    }

    /// Folds an appraised event into memory.
    ///
    /// Perception of source and target follows an EMA of the action degree,
    /// the source grows more familiar, and the agent's own standards for
    /// negative emotions toward the source drift with the action: hostile
    /// actions make them more permissive, friendly ones less. A first
    /// contact creates neutral self-standards for every emotion toward the
    /// source.
    pub fn update_after_event(
        &mut self,
        event: &EventRecord,
        params: &MemoryParams,
        emotions: &EmotionTable,
    ) -> Result<()> {
        let d_e = event.degree();
        let me = EntityId::self_id();

        if !event.source.is_self() && !self.entities.contains(&event.source) {
            for e in Emotion::ALL {
                self.standards.lookup_standard(e.name(), &me, &event.source);
            }
        }
        self.standards
            .lookup_standard(&event.action.name, &event.source, &event.target);

        for id in [&event.source, &event.target] {
            if id.is_self() {
                continue;
            }
            let p = self.entities.entry(id);
            p.perception = ((1.0 - params.perception_rate) * p.perception
                + params.perception_rate * d_e)
                .clamp(-1.0, 1.0);
        }
        if !event.source.is_self() {
            let p = self.entities.entry(&event.source);
            p.familiarity = (p.familiarity - params.familiarity_step).max(0.0);

            for spec in emotions.iter().filter(|s| s.valence == Valence::Negative) {
                let current = self
                    .standards
                    .lookup_standard(spec.emotion.name(), &me, &event.source);
                let signed =
                    (current.signed_approval() - params.standard_rate * d_e).clamp(-1.0, 1.0);
                let preference = if signed > 0.0 {
                    Preference::Yes
                } else if signed < 0.0 {
                    Preference::No
                } else {
                    current.preference
                };
                self.standards.insert(StandardEntry {
                    preference,
                    approval_degree: signed.abs().max(params.min_approval),
                    ..current
                })?;
            }
        }

        self.history.push(event.clone())
    }

    pub fn to_json(&self) -> String {
        let file = MemoryFile {
            version: MEMORY_FILE_VERSION,
            memory: self.clone(),
        };
        serde_json::to_string_pretty(&file).expect("memory serializes") + "\n"
    }

    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Memory::default());
        }
        let parsed: MemoryFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(file, e.line(), e.to_string()))?;
        if parsed.version != MEMORY_FILE_VERSION {
            return Err(Error::Version {
                what: "memory snapshot",
                found: parsed.version,
                expected: MEMORY_FILE_VERSION,
            });
        }
        parsed.memory.validate()?;
        Ok(parsed.memory)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?, &path.display().to_string())
    }
}
