//! First-order scoring: `(context, action)` to a signed degree.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{read_file, Error, Result};
use crate::types::{ActionSpec, EventRecord, Valence};

pub const DEFAULT_CONTEXT: &str = "default";

const SHIPPED: &str = include_str!("../data/actions.csv");

/// Action scores per context. Read-only once loaded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionScoreTable {
    rows: BTreeMap<(String, String), ActionSpec>,
}

impl ActionScoreTable {
    pub fn shipped() -> Self {
        Self::parse(SHIPPED, "<shipped actions>").expect("shipped action table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    /// Parses `context,action,valence,degree` rows with a header line.
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(file, 1, e.to_string()))?
            .clone();
        let expected = ["context", "action", "valence", "degree"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::parse(
                file,
                1,
                format!("expected header `{}`", expected.join(",")),
            ));
        }

        let mut table = ActionScoreTable::default();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(file, line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let err = |msg: String| Error::parse(file, line, msg);

            let (context, action) = (&record[0], &record[1]);
            if context.is_empty() || action.is_empty() {
                return Err(err("context and action must be non-empty".into()));
            }
            let valence = Valence::parse(&record[2])
                .ok_or_else(|| err(format!("unknown valence `{}`", &record[2])))?;
            let degree: f64 = record[3]
                .parse()
                .map_err(|_| err(format!("degree `{}` is not a number", &record[3])))?;
            let spec = ActionSpec::new(action, valence, degree).map_err(|e| err(e.to_string()))?;
            let key = (context.to_string(), action.to_string());
            if table.rows.insert(key, spec).is_some() {
                return Err(err(format!("duplicate action `{action}` in context `{context}`")));
            }
        }
        Ok(table)
    }

    pub fn get(&self, context: &str, action: &str) -> Option<&ActionSpec> {
        self.rows.get(&(context.to_string(), action.to_string()))
    }

    /// The scored action for `(context, action)`; unscored pairs are an error.
    pub fn action(&self, context: &str, action: &str) -> Result<ActionSpec> {
        self.get(context, action)
            .cloned()
            .ok_or_else(|| Error::UnscoredAction {
                context: context.to_string(),
                action: action.to_string(),
            })
    }

    pub fn contains(&self, context: &str, action: &str) -> bool {
        self.get(context, action).is_some()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ActionSpec)> {
        self.rows.iter().map(|((c, _), a)| (c.as_str(), a))
    }
}

/// The degree `d_e` the table assigns to the event's action in `context`.
pub fn elicit(event: &EventRecord, context: &str, table: &ActionScoreTable) -> Result<f64> {
    table.action(context, &event.action.name).map(|a| a.degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn event(action: &str) -> EventRecord {
        let spec = ActionSpec::new(action, Valence::Positive, 0.0).unwrap();
        EventRecord::new("JOHN".into(), spec, "SELF".into(), DateTime::UNIX_EPOCH).unwrap()
    }

    #[test]
    fn shipped_scores() {
        let t = ActionScoreTable::shipped();
        assert_eq!(elicit(&event("Greet"), "default", &t).unwrap(), 0.31);
        assert_eq!(elicit(&event("Kick"), "default", &t).unwrap(), -0.74);
        assert!(matches!(
            elicit(&event("UnknownDance"), "default", &t),
            Err(Error::UnscoredAction { .. })
        ));
    }

    #[test]
    fn context_is_part_of_the_key() {
        let t = ActionScoreTable::parse(
            "context,action,valence,degree\nparty,Shout,POSITIVE,0.2\nlibrary,Shout,NEGATIVE,-0.5\n",
            "t.csv",
        )
        .unwrap();
        assert_eq!(t.action("party", "Shout").unwrap().degree, 0.2);
        assert_eq!(t.action("library", "Shout").unwrap().degree, -0.5);
        assert!(t.action("default", "Shout").is_err());
    }

    #[test]
    fn errors_carry_row_numbers() {
        let bad = "context,action,valence,degree\ndefault,Greet,POSITIVE,0.31\ndefault,Kick,POSITIVE,-0.74\n";
        match ActionScoreTable::parse(bad, "a.csv") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let out_of_range = "context,action,valence,degree\ndefault,Smash,NEGATIVE,-1.5\n";
        match ActionScoreTable::parse(out_of_range, "a.csv") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(ActionScoreTable::parse("a,b\n", "a.csv").is_err());
        let dup = "context,action,valence,degree\ndefault,Greet,POSITIVE,0.3\ndefault,Greet,POSITIVE,0.3\n";
        assert!(ActionScoreTable::parse(dup, "a.csv").is_err());
    }
}
