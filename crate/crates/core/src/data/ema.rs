use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::data::participants::{csv_io, csv_parse_error};
use crate::data::Taxonomy;
use crate::error::{Error, Result};

pub const EMA_HEADER: [&str; 3] = ["user_id", "timestamp_utc", "activity_item"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmaEvent {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub item: String,
}

/// What to do with raw items the taxonomy does not know.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownItemPolicy {
    #[default]
    Strict,
    Lenient,
}

impl std::str::FromStr for UnknownItemPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(UnknownItemPolicy::Strict),
            "lenient" => Ok(UnknownItemPolicy::Lenient),
            other => Err(Error::InvalidConfig(format!("unknown item policy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmaAggregate {
    /// Per-user counts in taxonomy order.
    pub counts: BTreeMap<String, Vec<u32>>,
    /// Events dropped under the lenient policy, per user.
    pub skipped: BTreeMap<String, u32>,
}

impl EmaAggregate {
    pub fn total_skipped(&self) -> u32 {
        self.skipped.values().sum()
    }
}

pub fn load_ema(path: &Path) -> Result<Vec<EmaEvent>> {
    let text = std::fs::read_to_string(path)?;
    parse_ema(&text, &path.display().to_string())
}

pub fn parse_ema(text: &str, file: &str) -> Result<Vec<EmaEvent>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_parse_error(file, e))?;
    if headers.iter().ne(EMA_HEADER) {
        return Err(Error::SchemaMismatch {
            file: file.to_string(),
            message: format!("expected header `{}`", EMA_HEADER.join(",")),
        });
    }
    let mut events = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_parse_error(file, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |column: u64, message: String| Error::Parse {
            file: file.to_string(),
            line,
            column,
            message,
        };
        if record[0].is_empty() {
            return Err(parse_err(1, "empty user_id".into()));
        }
        let timestamp = DateTime::parse_from_rfc3339(&record[1])
            .map_err(|e| parse_err(2, format!("timestamp {:?}: {e}", &record[1])))?
            .with_timezone(&Utc);
        if record[2].is_empty() {
            return Err(parse_err(3, "empty activity_item".into()));
        }
        events.push(EmaEvent {
            user_id: record[0].to_string(),
            timestamp,
            item: record[2].to_string(),
        });
    }
    Ok(events)
}

pub fn ema_to_csv(events: &[EmaEvent]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(EMA_HEADER).map_err(csv_io)?;
    for e in events {
        writer
            .write_record([
                e.user_id.as_str(),
                &e.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
                e.item.as_str(),
            ])
            .map_err(csv_io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_ema(path: &Path, events: &[EmaEvent]) -> Result<()> {
    std::fs::write(path, ema_to_csv(events)?)?;
    Ok(())
}

/// Counts events per (user, category).
pub fn aggregate_ema(
    events: &[EmaEvent],
    taxonomy: &Taxonomy,
    policy: UnknownItemPolicy,
) -> Result<EmaAggregate> {
    let lookup = taxonomy.lookup();
    let mut agg = EmaAggregate::default();
    for e in events {
        match lookup.category(&e.item) {
            Some(idx) => {
                agg.counts
                    .entry(e.user_id.clone())
                    .or_insert_with(|| vec![0; taxonomy.len()])[idx] += 1;
            }
            None => match policy {
                UnknownItemPolicy::Strict => return Err(Error::UnknownActivityItem(e.item.clone())),
                UnknownItemPolicy::Lenient => *agg.skipped.entry(e.user_id.clone()).or_default() += 1,
            },
        }
    }
    Ok(agg)
}
