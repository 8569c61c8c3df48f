//! File formats, ingestion and the synthetic cohort generator.

mod correlation;
mod ema;
mod participants;
mod synthetic;
mod taxonomy;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use correlation::{
    builtin_correlation, builtin_correlation_csv, correlation_fingerprint, correlation_to_csv,
    load_correlation, parse_correlation, write_correlation,
};
pub use ema::{
    aggregate_ema, ema_to_csv, load_ema, parse_ema, write_ema, EmaAggregate, EmaEvent,
    UnknownItemPolicy, EMA_HEADER,
};
pub use participants::{
    load_participants, parse_participants, participants_to_csv, write_participants,
    ParticipantRecord, PARTICIPANT_HEADER,
};
pub use synthetic::{generate_synthetic, PlantedStatistic, SyntheticConfig, SyntheticPopulation};
pub use taxonomy::{Category, ItemLookup, Taxonomy};

use crate::classifier::WellbeingScore;
use crate::error::{Error, Result};
use crate::model::{normalize_activity_counts, ActivityDistribution, CorrelationMatrix, PersonalityVector};

pub const PARTICIPANTS_FILE: &str = "participants.csv";
pub const EMA_FILE: &str = "ema.csv";
pub const TAXONOMY_FILE: &str = "taxonomy.json";
pub const CORRELATION_FILE: &str = "correlation.csv";

/// One participant joined with their aggregated activity distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub personality: PersonalityVector,
    pub activity: ActivityDistribution,
    pub swb: WellbeingScore,
}

/// The four input files of a data directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub taxonomy: Taxonomy,
    pub correlation: CorrelationMatrix,
    pub participants: Vec<ParticipantRecord>,
    pub events: Vec<EmaEvent>,
}

impl Dataset {
    /// Loads `participants.csv` and `ema.csv` from `dir`. `taxonomy.json` and
    /// `correlation.csv` fall back to the built-in files when absent.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let taxonomy_path = dir.join(TAXONOMY_FILE);
        let taxonomy = if taxonomy_path.exists() {
            Taxonomy::load(&taxonomy_path)?
        } else {
            Taxonomy::builtin()
        };
        let correlation_path = dir.join(CORRELATION_FILE);
        let correlation = if correlation_path.exists() {
            load_correlation(&correlation_path, &taxonomy)?
        } else {
            builtin_correlation(&taxonomy)?
        };
        Ok(Dataset {
            participants: load_participants(&dir.join(PARTICIPANTS_FILE))?,
            events: load_ema(&dir.join(EMA_FILE))?,
            taxonomy,
            correlation,
        })
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.taxonomy.write(&dir.join(TAXONOMY_FILE))?;
        write_correlation(&dir.join(CORRELATION_FILE), &self.correlation, &self.taxonomy)?;
        write_participants(&dir.join(PARTICIPANTS_FILE), &self.participants)?;
        write_ema(&dir.join(EMA_FILE), &self.events)?;
        Ok(())
    }

    /// Joins participants with their activity distributions, in participant order.
    pub fn cohort(&self, policy: UnknownItemPolicy) -> Result<Vec<UserRecord>> {
        let agg = aggregate_ema(&self.events, &self.taxonomy, policy)?;
        join_cohort(&self.participants, &agg, self.taxonomy.len())
    }
}

pub fn join_cohort(participants: &[ParticipantRecord], agg: &EmaAggregate, n: usize) -> Result<Vec<UserRecord>> {
    let known: std::collections::HashSet<&str> = participants.iter().map(|p| p.user_id.as_str()).collect();
    if let Some(stray) = agg
        .counts
        .keys()
        .chain(agg.skipped.keys())
        .find(|u| !known.contains(u.as_str()))
    {
        return Err(Error::UnknownUser(stray.clone()));
    }
    participants
        .iter()
        .map(|p| {
            let counts = agg
                .counts
                .get(&p.user_id)
                .ok_or_else(|| Error::NoActivityReports(p.user_id.clone()))?;
            Ok(UserRecord {
                user_id: p.user_id.clone(),
                personality: p.personality,
                activity: normalize_activity_counts(counts, n)?,
                swb: p.swb,
            })
        })
        .collect()
}
