use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::artifact::ModelArtifact;
use crate::data::Taxonomy;
use crate::error::Result;
use crate::model::{ActivityDistribution, CorrelationMatrix, PersonalityVector};
use crate::recommender::{
    build_fill, select_high_variance, simulate_ranges, GridSpec, RecommenderConfig, Selection,
    SimulatedRanges, SimulationInput,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeMetadata {
    pub m: usize,
    pub lambda: f64,
    pub step: f64,
    pub total_units: u32,
    pub grid_count: u64,
    pub white_count: u64,
    pub black_count: u64,
    pub model_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityRangeEntry {
    pub category_id: String,
    pub name: String,
    pub white: Option<[f64; 2]>,
    pub black: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillEntry {
    pub category_id: String,
    pub name: String,
    pub proportion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub metadata: RangeMetadata,
    pub activities: Vec<ActivityRangeEntry>,
    pub fill: Vec<FillEntry>,
}

impl RangeReport {
    pub fn from_ranges(
        ranges: &SimulatedRanges,
        selection: &Selection,
        fill: &[f64],
        taxonomy: &Taxonomy,
        model_hash: String,
    ) -> Self {
        let grid = ranges.whitelist.grid;
        let white = ranges.whitelist.proportions();
        let black = ranges.blacklist.proportions();
        let pick = |b: &Option<Vec<(f64, f64)>>, k: usize| b.as_ref().map(|v| [v[k].0, v[k].1]);
        RangeReport {
            metadata: RangeMetadata {
                m: selection.varied.len(),
                lambda: grid.lambda,
                step: grid.step,
                total_units: grid.total_units,
                grid_count: ranges.grid_count,
                white_count: ranges.whitelist.count,
                black_count: ranges.blacklist.count,
                model_hash,
            },
            activities: selection
                .varied
                .iter()
                .enumerate()
                .map(|(k, &i)| ActivityRangeEntry {
                    category_id: taxonomy.categories[i].id.clone(),
                    name: taxonomy.categories[i].name.clone(),
                    white: pick(&white, k),
                    black: pick(&black, k),
                })
                .collect(),
            fill: selection
                .fixed
                .iter()
                .zip(fill)
                .map(|(&i, &p)| FillEntry {
                    category_id: taxonomy.categories[i].id.clone(),
                    name: taxonomy.categories[i].name.clone(),
                    proportion: p,
                })
                .collect(),
        }
    }
}

/// Selection and grid a recommendation would use, without running it.
pub fn plan_grid(artifact: &ModelArtifact, config: &RecommenderConfig) -> Result<(Selection, GridSpec)> {
    artifact.require_congruence()?;
    let selection = select_high_variance(&artifact.activity_stats, config)?;
    let grid = config.grid(&selection)?;
    Ok((selection, grid))
}

/// Ranges for one person. Without an observed distribution the fixed
/// activities are filled from the training cohort's means.
pub fn recommend(
    artifact: &ModelArtifact,
    taxonomy: &Taxonomy,
    correlation: &CorrelationMatrix,
    personality: &PersonalityVector,
    activity: Option<&ActivityDistribution>,
    config: &RecommenderConfig,
    workers: usize,
) -> Result<RangeReport> {
    let (selection, grid) = plan_grid(artifact, config)?;
    if let Some(a) = activity {
        if a.len() != taxonomy.len() {
            return Err(crate::error::Error::LengthMismatch {
                expected: taxonomy.len(),
                actual: a.len(),
            });
        }
    }
    let fill = build_fill(activity, &selection.fixed, grid.lambda, &artifact.activity_stats.mean);
    let input = SimulationInput {
        personality: *personality,
        selection: &selection,
        fill: &fill,
        grid,
        correlation,
        median: artifact.median,
    };
    let ranges = simulate_ranges(&input, &artifact.model, workers)?;
    Ok(RangeReport::from_ranges(&ranges, &selection, &fill, taxonomy, artifact.hash()))
}

/// Aligned text rendering of a range report.
pub fn format_range_table(report: &RangeReport) -> String {
    let fmt = |r: &Option<[f64; 2]>| match r {
        Some([lo, hi]) => format!("[{lo:.2}, {hi:.2}]"),
        None => "-".to_string(),
    };
    let width = report
        .activities
        .iter()
        .map(|a| a.name.len())
        .max()
        .unwrap_or(0)
        .max("Activity".len());
    let md = &report.metadata;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "m={} lambda={} step={} grid={} (high {}, low {})",
        md.m, md.lambda, md.step, md.grid_count, md.white_count, md.black_count
    );
    let _ = writeln!(out, "{:<width$} | {:>12} | {:>12}", "Activity", "Whitelist", "Blacklist");
    let _ = writeln!(out, "{}", "-".repeat(width + 30));
    for a in &report.activities {
        let _ = writeln!(out, "{:<width$} | {:>12} | {:>12}", a.name, fmt(&a.white), fmt(&a.black));
    }
    out
}
