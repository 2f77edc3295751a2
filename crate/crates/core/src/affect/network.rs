//! Appraisal-to-emotion link weights, factored over personality and mood.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::appraisal::AppraisalVariable;
use crate::emotion::Emotion;
use crate::error::{read_file, write_file, Error, Result};
use crate::types::{MoodState, PersonalityProfile};

pub const FACTOR_COUNT: usize = 6;
pub const FACTOR_NAMES: [&str; FACTOR_COUNT] = ["O", "C", "E", "A", "N", "M"];
const MODEL_VERSION: u32 = 1;

const VARS: usize = AppraisalVariable::COUNT;

/// `(O, C, E, A, N, mood)`: the values each link's factors multiply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factors(pub [f64; FACTOR_COUNT]);

impl Factors {
    pub fn new(personality: &PersonalityProfile, mood: MoodState) -> Self {
        let t = personality.traits();
        Factors([t[0], t[1], t[2], t[3], t[4], mood.value()])
    }
}

/// The association table: which variables feed which emotions.
pub fn occ_links(e: Emotion) -> &'static [AppraisalVariable] {
    use AppraisalVariable::*;
    match e {
        Emotion::Joy | Emotion::Distress => &[Desirability],
        Emotion::HappyFor | Emotion::SorryFor => &[Desirability, Deservingness],
        Emotion::Appreciation | Emotion::Reproach => &[Praiseworthiness, Unexpectedness],
        Emotion::Gratitude | Emotion::Anger => &[Desirability, Praiseworthiness, Unexpectedness],
        Emotion::Liking | Emotion::Disliking => &[Appealingness, Familiarity],
    }
}

pub type Link = [f64; FACTOR_COUNT];

/// Factor values `f` for every linked `(emotion, variable)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel {
    links: [[Option<Link>; VARS]; Emotion::COUNT],
}

impl WeightModel {
    /// All-zero factors on the given links.
    pub fn zeros(topology: impl Fn(Emotion, AppraisalVariable) -> bool) -> Self {
        let mut links = [[None; VARS]; Emotion::COUNT];
        for e in Emotion::ALL {
            for v in AppraisalVariable::ALL {
                if topology(e, v) {
                    links[e.index()][v.index()] = Some([0.0; FACTOR_COUNT]);
                }
            }
        }
        WeightModel { links }
    }

    pub fn zeros_occ() -> Self {
        Self::zeros(|e, v| occ_links(e).contains(&v))
    }

    /// Every emotion linked to every variable.
    pub fn zeros_dense() -> Self {
        Self::zeros(|_, _| true)
    }

    /// Shipped hand-set weights on the association table.
    ///
    /// Extraversion and agreeableness lean into positive emotions,
    /// neuroticism into negative ones, and mood pulls each emotion toward
    /// its own valence. Links that turn a negative appraisal into a
    /// negative emotion carry negative factors.
    pub fn occ_default() -> Self {
        use AppraisalVariable::*;
        const POS: Link = [0.1, 0.1, 0.3, 0.2, 0.0, 0.2];
        const NEG: Link = [0.1, 0.1, 0.0, 0.1, 0.4, -0.2];
        const MODIFIER: Link = [0.2, 0.2, 0.2, 0.2, 0.2, 0.0];
        let neg = |l: Link| l.map(|x| -x);

        let mut m = Self::zeros_occ();
        for e in Emotion::ALL {
            let positive = matches!(
                e,
                Emotion::Joy | Emotion::HappyFor | Emotion::Appreciation | Emotion::Gratitude | Emotion::Liking
            );
            for &v in occ_links(e) {
                let f = match v {
                    Unexpectedness | Familiarity => MODIFIER,
                    _ if positive => POS,
                    _ => neg(NEG),
                };
                m.links[e.index()][v.index()] = Some(f);
            }
        }
        m
    }

    pub fn has_link(&self, e: Emotion, v: AppraisalVariable) -> bool {
        self.links[e.index()][v.index()].is_some()
    }

    pub fn factors(&self, e: Emotion, v: AppraisalVariable) -> Option<&Link> {
        self.links[e.index()][v.index()].as_ref()
    }

    pub fn factors_mut(&mut self, e: Emotion, v: AppraisalVariable) -> Option<&mut Link> {
        self.links[e.index()][v.index()].as_mut()
    }

    /// Linked variables of `e` in canonical order.
    pub fn linked(&self, e: Emotion) -> impl Iterator<Item = AppraisalVariable> + '_ {
        AppraisalVariable::ALL
            .into_iter()
            .filter(move |&v| self.has_link(e, v))
    }

    pub fn link_count(&self) -> usize {
        self.links.iter().flatten().filter(|l| l.is_some()).count()
    }

    /// Unclamped `sum_x f_x m_x`.
    pub fn raw_weight(&self, e: Emotion, v: AppraisalVariable, m: &Factors) -> Option<f64> {
        self.factors(e, v)
            .map(|f| f.iter().zip(m.0).map(|(f, m)| f * m).sum())
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION,
            factors: FACTOR_NAMES.iter().map(|s| s.to_string()).collect(),
            links: Emotion::ALL
                .iter()
                .flat_map(|&e| {
                    self.linked(e).map(move |v| LinkRow {
                        emotion: e,
                        variable: v,
                        factors: *self.factors(e, v).expect("linked"),
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes") + "\n"
    }

    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        let parsed: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(file, e.line(), e.to_string()))?;
        if parsed.version != MODEL_VERSION {
            return Err(Error::Version {
                what: "weight model",
                found: parsed.version,
                expected: MODEL_VERSION,
            });
        }
        if parsed.factors != FACTOR_NAMES {
            return Err(Error::parse(
                file,
                0,
                format!("factors must be {FACTOR_NAMES:?}"),
            ));
        }
        let mut model = WeightModel {
            links: [[None; VARS]; Emotion::COUNT],
        };
        for row in parsed.links {
            if row.factors.iter().any(|f| !f.is_finite()) {
                return Err(Error::parse(
                    file,
                    0,
                    format!("non-finite factor on {} <- {}", row.emotion, row.variable),
                ));
            }
            let slot = &mut model.links[row.emotion.index()][row.variable.index()];
            if slot.replace(row.factors).is_some() {
                return Err(Error::parse(
                    file,
                    0,
                    format!("duplicate link {} <- {}", row.emotion, row.variable),
                ));
            }
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?, &path.display().to_string())
    }
}

impl Default for WeightModel {
    fn default() -> Self {
        Self::occ_default()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    factors: Vec<String>,
    links: Vec<LinkRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkRow {
    emotion: Emotion,
    variable: AppraisalVariable,
    factors: Link,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_matches_the_association_table() {
        let m = WeightModel::occ_default();
        assert_eq!(m.link_count(), 20);
        assert!(!m.has_link(Emotion::Joy, AppraisalVariable::Praiseworthiness));
        assert!(m.has_link(Emotion::Anger, AppraisalVariable::Unexpectedness));
        for e in Emotion::ALL {
            assert!(!m.has_link(e, AppraisalVariable::GoalConduciveness));
        }
        assert_eq!(WeightModel::zeros_dense().link_count(), 70);
    }

    #[test]
    fn default_signs_turn_bad_news_into_negative_emotions() {
        let m = WeightModel::occ_default();
        let f = Factors::new(&PersonalityProfile::neutral(), MoodState::default());
        let w = |e, v| m.raw_weight(e, v, &f).unwrap();
        assert!(w(Emotion::Joy, AppraisalVariable::Desirability) > 0.0);
        assert!(w(Emotion::Distress, AppraisalVariable::Desirability) < 0.0);
        assert!(w(Emotion::Anger, AppraisalVariable::Praiseworthiness) < 0.0);
        assert!(w(Emotion::Anger, AppraisalVariable::Unexpectedness) > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let m = WeightModel::occ_default();
        let text = m.to_json();
        let back = WeightModel::from_json(&text, "m.json").unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
        assert!(WeightModel::from_json(&text.replace("\"version\": 1", "\"version\": 9"), "m").is_err());
    }
}
