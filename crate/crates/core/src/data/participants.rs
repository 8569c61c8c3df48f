use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::WellbeingScore;
use crate::error::{Error, Result};
use crate::model::{PersonalityVector, Trait, REPORTED_MAX, REPORTED_MIN};

pub const PARTICIPANT_HEADER: [&str; 7] = [
    "user_id",
    "extraversion",
    "agreeableness",
    "conscientiousness",
    "neuroticism",
    "openness",
    "swb",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub user_id: String,
    pub personality: PersonalityVector,
    pub swb: WellbeingScore,
}

pub fn load_participants(path: &Path) -> Result<Vec<ParticipantRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_participants(&text, &path.display().to_string())
}

pub fn parse_participants(text: &str, file: &str) -> Result<Vec<ParticipantRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_parse_error(file, e))?;
    if headers.iter().ne(PARTICIPANT_HEADER) {
        return Err(Error::SchemaMismatch {
            file: file.to_string(),
            message: format!(
                "expected header `{}`, found `{}`",
                PARTICIPANT_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_parse_error(file, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let user_id = record[0].to_string();
        if user_id.is_empty() {
            return Err(Error::Parse {
                file: file.to_string(),
                line,
                column: 1,
                message: "empty user_id".into(),
            });
        }
        if !ids.insert(user_id.clone()) {
            return Err(Error::SchemaMismatch {
                file: file.to_string(),
                message: format!("line {line}: duplicate user_id {user_id:?}"),
            });
        }

        let mut scores = [0.0; 5];
        for t in Trait::ALL {
            let col = t.index() + 1;
            let cell = &record[col];
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                file: file.to_string(),
                line,
                column: col as u64 + 1,
                message: format!("{cell:?} is not a number"),
            })?;
            if !(REPORTED_MIN..=REPORTED_MAX).contains(&value) {
                return Err(Error::RangeViolation {
                    file: file.to_string(),
                    row: line,
                    field: PARTICIPANT_HEADER[col].to_string(),
                    value: cell.to_string(),
                });
            }
            scores[t.index()] = value;
        }

        let cell = &record[6];
        let swb = cell
            .parse::<u8>()
            .ok()
            .and_then(|v| WellbeingScore::new(v).ok())
            .ok_or_else(|| Error::RangeViolation {
                file: file.to_string(),
                row: line,
                field: "swb".into(),
                value: cell.to_string(),
            })?;

        out.push(ParticipantRecord {
            user_id,
            personality: PersonalityVector(scores),
            swb,
        });
    }
    Ok(out)
}

pub fn participants_to_csv(records: &[ParticipantRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(PARTICIPANT_HEADER).map_err(csv_io)?;
    for r in records {
        let mut row = vec![r.user_id.clone()];
        row.extend(r.personality.as_array().iter().map(|v| v.to_string()));
        row.push(r.swb.value().to_string());
        writer.write_record(&row).map_err(csv_io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_participants(path: &Path, records: &[ParticipantRecord]) -> Result<()> {
    std::fs::write(path, participants_to_csv(records)?)?;
    Ok(())
}

pub(crate) fn csv_parse_error(file: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        file: file.to_string(),
        line,
        column: 0,
        message: e.to_string(),
    }
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
