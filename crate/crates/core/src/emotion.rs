//! The ten OCC emotion types, their circumplex-derived valence degrees and
//! per-emotion constants (threshold, decay time).

use std::fmt;
use std::ops::{Index, IndexMut};
use std::path::Path;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{read_file, toml_error, Error, Result};
use crate::types::Valence;

const DEFAULT_EMOTIONS: &str = include_str!("../data/emotions.toml");
const EMOTION_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Joy,
    Distress,
    HappyFor,
    SorryFor,
    Appreciation,
    Reproach,
    Gratitude,
    Anger,
    Liking,
    Disliking,
}

impl Emotion {
    pub const COUNT: usize = 10;

    pub const ALL: [Emotion; Emotion::COUNT] = [
        Emotion::Joy,
        Emotion::Distress,
        Emotion::HappyFor,
        Emotion::SorryFor,
        Emotion::Appreciation,
        Emotion::Reproach,
        Emotion::Gratitude,
        Emotion::Anger,
        Emotion::Liking,
        Emotion::Disliking,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Joy => "joy",
            Emotion::Distress => "distress",
            Emotion::HappyFor => "happy_for",
            Emotion::SorryFor => "sorry_for",
            Emotion::Appreciation => "appreciation",
            Emotion::Reproach => "reproach",
            Emotion::Gratitude => "gratitude",
            Emotion::Anger => "anger",
            Emotion::Liking => "liking",
            Emotion::Disliking => "disliking",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid("emotion", format!("unknown emotion `{s}`")))
    }
}

/// One value per emotion, serialized as a name-keyed map in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionMap<T>([T; Emotion::COUNT]);

impl<T: Copy> EmotionMap<T> {
    pub fn filled(value: T) -> Self {
        EmotionMap([value; Emotion::COUNT])
    }
}

impl<T> EmotionMap<T> {
    pub fn from_fn(mut f: impl FnMut(Emotion) -> T) -> Self {
        EmotionMap(Emotion::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Emotion, &T)> {
        Emotion::ALL.into_iter().zip(self.0.iter())
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }

    pub fn map<U>(&self, mut f: impl FnMut(Emotion, &T) -> U) -> EmotionMap<U> {
        EmotionMap::from_fn(|e| f(e, &self.0[e.index()]))
    }
}

impl<T: Default + Copy> Default for EmotionMap<T> {
    fn default() -> Self {
        EmotionMap::filled(T::default())
    }
}

impl<T> Index<Emotion> for EmotionMap<T> {
    type Output = T;

    fn index(&self, e: Emotion) -> &T {
        &self.0[e.index()]
    }
}

impl<T> IndexMut<Emotion> for EmotionMap<T> {
    fn index_mut(&mut self, e: Emotion) -> &mut T {
        &mut self.0[e.index()]
    }
}

impl<T: Serialize> Serialize for EmotionMap<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(Emotion::COUNT))?;
        for (e, v) in self.iter() {
            map.serialize_entry(e.name(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for EmotionMap<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct MapVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for MapVisitor<T> {
            type Value = EmotionMap<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with one entry per emotion")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut slots: [Option<T>; Emotion::COUNT] = Default::default();
                while let Some(key) = access.next_key::<Emotion>()? {
                    let slot = &mut slots[key.index()];
                    if slot.is_some() {
                        return Err(de::Error::custom(format!("duplicate emotion `{key}`")));
                    }
                    *slot = Some(access.next_value()?);
                }
                let mut out = Vec::with_capacity(Emotion::COUNT);
                for (e, slot) in Emotion::ALL.into_iter().zip(slots) {
                    out.push(slot.ok_or_else(|| de::Error::custom(format!("missing emotion `{e}`")))?);
                }
                match out.try_into() {
                    Ok(arr) => Ok(EmotionMap(arr)),
                    Err(_) => unreachable!(),
                }
            }
        }

        deserializer.deserialize_map(MapVisitor(std::marker::PhantomData))
    }
}

/// Projects a circumplex angle onto the valence axis: `cos(angle)`.
pub fn valence_degree(angle_deg: f64) -> f64 {
    angle_deg.to_radians().cos()
}

/// `(name, valence, degree, threshold, decay time)` for one emotion type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmotionSpec {
    pub emotion: Emotion,
    pub angle_deg: f64,
    pub valence: Valence,
    pub valence_degree: f64,
    pub threshold: f64,
    pub decay_time_s: f64,
}

impl EmotionSpec {
    pub fn new(emotion: Emotion, angle_deg: f64, threshold: f64, decay_time_s: f64) -> Result<Self> {
        if !(0.0..360.0).contains(&angle_deg) {
            return Err(Error::invalid(
                "emotion spec",
                format!("{emotion}: angle {angle_deg} outside [0, 360)"),
            ));
        }
        if !(0.0..1.0).contains(&threshold) {
            return Err(Error::invalid(
                "emotion spec",
                format!("{emotion}: threshold {threshold} outside [0, 1)"),
            ));
        }
        if !(decay_time_s > 0.0 && decay_time_s.is_finite()) {
            return Err(Error::invalid(
                "emotion spec",
                format!("{emotion}: decay time {decay_time_s} must be positive"),
            ));
        }
        let degree = valence_degree(angle_deg);
        Ok(EmotionSpec {
            emotion,
            angle_deg,
            valence: Valence::of(degree),
            valence_degree: degree,
            threshold,
            decay_time_s,
        })
    }

    pub fn is_positive(&self) -> bool {
        self.valence == Valence::Positive
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmotionFile {
    version: u32,
    emotion: Vec<EmotionRow>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EmotionRow {
    name: String,
    angle_deg: f64,
    #[serde(default)]
    threshold: f64,
    #[serde(default = "default_decay")]
    decay_time_s: f64,
}

fn default_decay() -> f64 {
    10.0
}

/// The full set of emotion specs, one per emotion type.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionTable {
    specs: EmotionMap<EmotionSpec>,
}

impl EmotionTable {
    /// The shipped circumplex table with zero thresholds and 10 s decay.
    pub fn shipped() -> Self {
        Self::parse(DEFAULT_EMOTIONS, "emotions.toml").expect("shipped emotion table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let parsed: EmotionFile =
            toml::from_str(text).map_err(|e| toml_error(text, file, &e))?;
        if parsed.version != EMOTION_FILE_VERSION {
            return Err(Error::Version {
                what: "emotion file",
                found: parsed.version,
                expected: EMOTION_FILE_VERSION,
            });
        }
        let mut slots: [Option<EmotionSpec>; Emotion::COUNT] = Default::default();
        for row in parsed.emotion {
            let emotion: Emotion = row.name.parse()?;
            if slots[emotion.index()].is_some() {
                return Err(Error::invalid("emotion spec", format!("duplicate entry for {emotion}")));
            }
            slots[emotion.index()] =
                Some(EmotionSpec::new(emotion, row.angle_deg, row.threshold, row.decay_time_s)?);
        }
        let mut specs = Vec::with_capacity(Emotion::COUNT);
        for (e, slot) in Emotion::ALL.into_iter().zip(slots) {
            specs.push(slot.ok_or_else(|| Error::invalid("emotion spec", format!("missing entry for {e}")))?);
        }
        let specs: [EmotionSpec; Emotion::COUNT] = specs.try_into().expect("ten specs");
        Ok(EmotionTable {
            specs: EmotionMap(specs),
        })
    }

    pub fn to_toml(&self) -> String {
        let mut out = format!("version = {EMOTION_FILE_VERSION}\n");
        for (_, s) in self.specs.iter() {
            out.push_str(&format!(
                "\n[[emotion]]\nname = \"{}\"\nangle_deg = {:?}\nthreshold = {:?}\ndecay_time_s = {:?}\n",
                s.emotion, s.angle_deg, s.threshold, s.decay_time_s
            ));
        }
        out
    }

    pub fn get(&self, e: Emotion) -> &EmotionSpec {
        &self.specs[e]
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmotionSpec> {
        self.specs.values()
    }

    pub fn with_threshold(mut self, e: Emotion, threshold: f64) -> Result<Self> {
        let s = &self.specs[e];
        self.specs[e] = EmotionSpec::new(e, s.angle_deg, threshold, s.decay_time_s)?;
        Ok(self)
    }

    pub fn with_decay_time(mut self, e: Emotion, decay_time_s: f64) -> Result<Self> {
        let s = &self.specs[e];
        self.specs[e] = EmotionSpec::new(e, s.angle_deg, s.threshold, decay_time_s)?;
        Ok(self)
    }
}

impl Default for EmotionTable {
    fn default() -> Self {
        Self::shipped()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Circumplex table rows: (emotion, angle, published valence degree).
    const TABLE: [(Emotion, f64, f64); 10] = [
        (Emotion::Joy, 0.0, 1.0),
        (Emotion::Distress, 144.0, -0.8090),
        (Emotion::HappyFor, 58.0, 0.5299),
        (Emotion::SorryFor, 122.0, -0.5299),
        (Emotion::Appreciation, 26.0, 0.8988),
        (Emotion::Reproach, 153.33, -0.8936),
        (Emotion::Gratitude, 8.0, 0.9903),
        (Emotion::Anger, 164.75, -0.9648),
        (Emotion::Liking, 14.5, 0.9681),
        (Emotion::Disliking, 165.5, -0.9681),
    ];

    #[test]
    fn valence_degree_examples() {
        assert_eq!(valence_degree(0.0), 1.0);
        assert!((valence_degree(144.0) + 0.8090).abs() < 1e-4);
        assert!(valence_degree(90.0).abs() < 1e-15);
        assert!((valence_degree(164.75) + 0.9648).abs() < 1e-4);
    }

    #[test]
    fn shipped_table_matches_circumplex_rows() {
        let table = EmotionTable::shipped();
        for (e, angle, degree) in TABLE {
            let spec = table.get(e);
            assert_eq!(spec.angle_deg, angle);
            assert!((spec.valence_degree - degree).abs() <= 1e-3, "{e}");
            assert_eq!(spec.valence, Valence::of(degree), "{e}");
            assert_eq!(spec.threshold, 0.0);
            assert_eq!(spec.decay_time_s, 10.0);
        }
    }

    #[test]
    fn table_round_trips_through_toml() {
        let table = EmotionTable::shipped();
        let again = EmotionTable::parse(&table.to_toml(), "x").unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn rejects_missing_and_bad_rows() {
        let text = "version = 1\n[[emotion]]\nname = \"joy\"\nangle_deg = 0.0\n";
        assert!(matches!(EmotionTable::parse(text, "x"), Err(Error::Invalid { .. })));
        let bad = DEFAULT_EMOTIONS.replace("angle_deg = 144.0", "angle_deg = 400.0");
        assert!(EmotionTable::parse(&bad, "x").is_err());
        let bad = DEFAULT_EMOTIONS.replace("version = 1", "version = 7");
        assert!(matches!(EmotionTable::parse(&bad, "x"), Err(Error::Version { .. })));
    }

    #[test]
    fn emotion_map_serde_is_name_keyed() {
        let m = EmotionMap::from_fn(|e| e.index() as f64);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with("{\"joy\":0.0,\"distress\":1.0"));
        let back: EmotionMap<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<EmotionMap<f64>>("{\"joy\":1.0}").is_err());
    }
}
