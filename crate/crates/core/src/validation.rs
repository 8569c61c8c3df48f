//! Containment of observed behavior in personalized ranges.
//!
//! Users are split by SWB. Each user's ranges are simulated from their own
//! personality and fill, and their observed proportions are checked against
//! the whitelist (high group) or blacklist (low group).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::artifact::ModelArtifact;
use crate::classifier::{binarize_swb, SwbLabel};
use crate::data::UserRecord;
use crate::error::{Error, Result};
use crate::model::{ActivityDistribution, CorrelationMatrix};
use crate::parallel::map_chunked;
use crate::recommender::{
    build_fill, select_high_variance, simulate_ranges, ActivityRanges, ActivityStats, GridSpec,
    RecommenderConfig, Selection, SimulationInput,
};

const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentResult {
    /// One flag per varied activity.
    pub flags: Vec<bool>,
    pub in_count: usize,
    pub k: usize,
    pub all_in: bool,
    pub majority_in: bool,
}

/// Majority threshold scaled from "5 of 8".
pub fn default_majority(m: usize) -> usize {
    (5 * m).div_ceil(8)
}

pub fn in_range(dist: &ActivityDistribution, ranges: &ActivityRanges, k: usize) -> Result<ContainmentResult> {
    let bounds = ranges.proportions().ok_or(Error::EmptyRanges)?;
    let flags: Vec<bool> = ranges
        .activities
        .iter()
        .zip(&bounds)
        .map(|(&i, &(lo, hi))| lo - BOUND_TOLERANCE <= dist[i] && dist[i] <= hi + BOUND_TOLERANCE)
        .collect();
    let in_count = flags.iter().filter(|f| **f).count();
    Ok(ContainmentResult {
        all_in: in_count == flags.len(),
        majority_in: in_count >= k,
        in_count,
        k,
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationConfig {
    pub recommender: RecommenderConfig,
    /// Majority threshold; defaults to `ceil(5m/8)`.
    pub k: Option<usize>,
    /// Fixes the varied activities instead of selecting them from the cohort.
    pub selection: Option<Selection>,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            recommender: RecommenderConfig::default(),
            k: None,
            selection: None,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    All { m: usize },
    Majority { k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserValidation {
    pub user_id: String,
    pub group: SwbLabel,
    /// `None` when the relevant range set was empty.
    pub containment: Option<ContainmentResult>,
}

impl UserValidation {
    fn matches(&self, criterion: Criterion) -> bool {
        match (&self.containment, criterion) {
            (None, _) => false,
            (Some(c), Criterion::All { .. }) => c.all_in,
            (Some(c), Criterion::Majority { .. }) => c.majority_in,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub group: SwbLabel,
    pub criterion: Criterion,
    pub matched: usize,
    pub size: usize,
    pub fraction: f64,
    pub empty_ranges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub selection: Selection,
    pub grid: GridSpec,
    pub k: usize,
    pub threshold: f64,
    pub reports: Vec<CohortReport>,
    pub users: Vec<UserValidation>,
}

impl ValidationReport {
    pub fn report(&self, group: SwbLabel, criterion: Criterion) -> Option<&CohortReport> {
        self.reports.iter().find(|r| r.group == group && r.criterion == criterion)
    }

    /// Re-scores stored results under another majority threshold.
    pub fn majority_fraction(&self, group: SwbLabel, k: usize) -> f64 {
        let members: Vec<&UserValidation> = self.users.iter().filter(|u| u.group == group).collect();
        let matched = members
            .iter()
            .filter(|u| u.containment.as_ref().is_some_and(|c| c.in_count >= k))
            .count();
        matched as f64 / members.len() as f64
    }
}

pub fn validate_cohort(
    cohort: &[UserRecord],
    artifact: &ModelArtifact,
    correlation: &CorrelationMatrix,
    config: &ValidationConfig,
) -> Result<ValidationReport> {
    artifact.require_congruence()?;
    let scores: Vec<_> = cohort.iter().map(|u| u.swb).collect();
    let (labels, threshold) = binarize_swb(&scores)?;
    let stats = ActivityStats::from_distributions(cohort.iter().map(|u| &u.activity))?;
    let selection = match &config.selection {
        Some(s) => s.clone(),
        None => select_high_variance(&stats, &config.recommender)?,
    };
    let grid = config.recommender.grid(&selection)?;
    let m = selection.varied.len();
    let k = config.k.unwrap_or_else(|| default_majority(m));
    if k == 0 || k > m {
        return Err(Error::InvalidConfig(format!("majority threshold {k} outside 1..={m}")));
    }

    let indices: Vec<usize> = (0..cohort.len()).collect();
    let users = map_chunked(&indices, config.workers, |&j| {
        let user = &cohort[j];
        let fill = build_fill(Some(&user.activity), &selection.fixed, grid.lambda, &stats.mean);
        let input = SimulationInput {
            personality: user.personality,
            selection: &selection,
            fill: &fill,
            grid,
            correlation,
            median: artifact.median,
        };
        let ranges = simulate_ranges(&input, &artifact.model, 1)?;
        let relevant = match labels[j] {
            SwbLabel::High => &ranges.whitelist,
            SwbLabel::Low => &ranges.blacklist,
        };
        let containment = match in_range(&user.activity, relevant, k) {
            Ok(c) => Some(c),
            Err(Error::EmptyRanges) => None,
            Err(e) => return Err(e),
        };
        Ok(UserValidation {
            user_id: user.user_id.clone(),
            group: labels[j],
            containment,
        })
    })?;

    let mut reports = Vec::new();
    for criterion in [Criterion::All { m }, Criterion::Majority { k }] {
        for group in [SwbLabel::High, SwbLabel::Low] {
            let members: Vec<&UserValidation> = users.iter().filter(|u| u.group == group).collect();
            let matched = members.iter().filter(|u| u.matches(criterion)).count();
            reports.push(CohortReport {
                group,
                criterion,
                matched,
                size: members.len(),
                fraction: matched as f64 / members.len() as f64,
                empty_ranges: members.iter().filter(|u| u.containment.is_none()).count(),
            });
        }
    }
    Ok(ValidationReport {
        selection,
        grid,
        k,
        threshold,
        reports,
        users,
    })
}

/// Aligned text table: activities considered, group, matched fraction.
pub fn format_validation_table(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} | {:<9} | {:>16}", "Activities considered", "Group", "Matched");
    let _ = writeln!(out, "{}", "-".repeat(22 + 3 + 9 + 3 + 16));
    for r in &report.reports {
        let considered = match r.criterion {
            Criterion::All { m } => format!("All ({m})"),
            Criterion::Majority { k } => format!("At least {k}"),
        };
        let group = match r.group {
            SwbLabel::High => "High SWB",
            SwbLabel::Low => "Low SWB",
        };
        let matched = format!("{:.1}% ({}/{})", r.fraction * 100.0, r.matched, r.size);
        let _ = writeln!(out, "{considered:<22} | {group:<9} | {matched:>16}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{FeatureSetKind, LinearModel, SvmParams, WellbeingScore};
    use crate::data::{builtin_correlation, generate_synthetic, Dataset, SyntheticConfig, Taxonomy, UnknownItemPolicy};
    use crate::model::MedianAnchor;
    use crate::recommender::Compositions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ranges(bounds: Option<Vec<(u32, u32)>>) -> ActivityRanges {
        ActivityRanges {
            label: SwbLabel::High,
            activities: vec![0, 2, 3],
            grid: GridSpec::new(0.1, 0.1).unwrap(),
            count: u64::from(bounds.is_some()),
            bounds,
        }
    }

    #[test]
    fn one_activity_outside() {
        let r = ranges(Some(vec![(1, 3), (0, 9), (2, 2)]));
        let inside = ActivityDistribution::new(vec![0.3, 0.1, 0.4, 0.2]).unwrap();
        let c = in_range(&inside, &r, 2).unwrap();
        assert!(c.all_in && c.majority_in);
        let outside = ActivityDistribution::new(vec![0.4, 0.0, 0.4, 0.2]).unwrap();
        let c = in_range(&outside, &r, 2).unwrap();
        assert_eq!(c.flags, vec![false, true, true]);
        assert!(!c.all_in && c.majority_in);
        assert!(matches!(in_range(&inside, &ranges(None), 2), Err(Error::EmptyRanges)));
    }

    #[test]
    fn flags_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let bounds: Vec<(u32, u32)> = (0..3)
                .map(|_| {
                    let a = rng.random_range(0..=9);
                    (a, rng.random_range(a..=9))
                })
                .collect();
            let r = ranges(Some(bounds.clone()));
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let dist = ActivityDistribution::new(raw.iter().map(|v| v / s).collect()).unwrap();
            let c = in_range(&dist, &r, 2).unwrap();
            for (slot, (&i, &(lo, hi))) in [0usize, 2, 3].iter().zip(&bounds).enumerate() {
                let expect = dist[i] * 10.0 >= lo as f64 - 1e-8 && dist[i] * 10.0 <= hi as f64 + 1e-8;
                assert_eq!(c.flags[slot], expect);
            }
            assert!(!c.all_in || c.majority_in);
        }
    }

    #[test]
    fn default_majority_scales_five_of_eight() {
        assert_eq!(default_majority(8), 5);
        assert_eq!(default_majority(1), 1);
        assert_eq!(default_majority(4), 3);
        assert_eq!(default_majority(15), 10);
    }

    fn artifact_with(model: LinearModel, taxonomy: &Taxonomy, correlation: &CorrelationMatrix, users: &[UserRecord]) -> ModelArtifact {
        let mut art = crate::artifact::train_artifact(
            users,
            FeatureSetKind::Congruence,
            taxonomy,
            correlation,
            &SvmParams::default(),
            MedianAnchor::CohortMedian,
        )
        .unwrap();
        art.model = model;
        art
    }

    fn synthetic(n: usize) -> (Dataset, Vec<UserRecord>) {
        let taxonomy = Taxonomy::builtin();
        let correlation = builtin_correlation(&taxonomy).unwrap();
        let pop = generate_synthetic(&SyntheticConfig { cohort_size: n, ..Default::default() }, &correlation, &taxonomy).unwrap();
        let ds = Dataset { taxonomy, correlation, participants: pop.participants, events: pop.events };
        let users = ds.cohort(UnknownItemPolicy::Strict).unwrap();
        (ds, users)
    }

    #[test]
    fn empty_ranges_count_as_misses() {
        let (ds, users) = synthetic(20);
        let always_high = artifact_with(LinearModel::from_parts(vec![0.0; 5], 1.0), &ds.taxonomy, &ds.correlation, &users);
        let config = ValidationConfig {
            recommender: RecommenderConfig { m: Some(3), ..Default::default() },
            ..Default::default()
        };
        let report = validate_cohort(&users, &always_high, &ds.correlation, &config).unwrap();
        for r in &report.reports {
            if r.group == SwbLabel::Low {
                assert_eq!(r.fraction, 0.0);
                assert_eq!(r.empty_ranges, r.size);
            }
        }
        assert!(report.users.iter().filter(|u| u.group == SwbLabel::Low).all(|u| u.containment.is_none()));
    }

    #[test]
    fn users_on_compatible_grid_points_all_match() {
        let (ds, mut users) = synthetic(24);
        let n = ds.taxonomy.len();
        let selection = Selection { varied: vec![0, 3, 5, 9], fixed: (0..n).filter(|i| ![0, 3, 5, 9].contains(i)).collect() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = LinearModel::from_parts((0..5).map(|_| rng.random_range(-1.0..1.0)).collect(), 0.0);
        let art = artifact_with(model, &ds.taxonomy, &ds.correlation, &users);
        let recommender = RecommenderConfig { m: Some(4), ..Default::default() };
        let grid = recommender.grid(&selection).unwrap();
        let fill: Vec<f64> = vec![0.1 / selection.fixed.len() as f64; selection.fixed.len()];

        let mut placed = Vec::new();
        for (j, user) in users.iter_mut().enumerate() {
            let want_high = j % 2 == 0;
            let input = SimulationInput {
                personality: user.personality,
                selection: &selection,
                fill: &fill,
                grid,
                correlation: &ds.correlation,
                median: art.median,
            };
            let point = Compositions::new(4, grid.total_units)
                .find(|u| input.score(u, &art.model).unwrap().0.is_high() == want_high);
            let Some(point) = point else { continue };
            user.activity = input.distribution(&point).unwrap();
            user.swb = WellbeingScore::new(if want_high { 9 } else { 2 }).unwrap();
            placed.push(user.user_id.clone());
        }
        assert!(placed.len() >= 20, "only {} users placed", placed.len());
        users.retain(|u| placed.contains(&u.user_id));
        // the median split needs at least as many high scores as low ones
        let highs = users.iter().filter(|u| u.swb.value() == 9).count();
        let mut lows = 0;
        users.retain(|u| {
            lows += usize::from(u.swb.value() == 2);
            u.swb.value() == 9 || lows <= highs
        });

        let config = ValidationConfig { recommender, selection: Some(selection), ..Default::default() };
        let report = validate_cohort(&users, &art, &ds.correlation, &config).unwrap();
        for r in &report.reports {
            assert_eq!(r.fraction, 1.0, "{r:?}");
        }
    }

    #[test]
    fn majority_is_monotone_in_k_and_dominates_all() {
        let (ds, users) = synthetic(30);
        let art = crate::artifact::train_artifact(
            &users,
            FeatureSetKind::Congruence,
            &ds.taxonomy,
            &ds.correlation,
            &SvmParams::default(),
            MedianAnchor::CohortMedian,
        )
        .unwrap();
        let config = ValidationConfig {
            recommender: RecommenderConfig { m: Some(5), ..Default::default() },
            workers: 3,
            ..Default::default()
        };
        let report = validate_cohort(&users, &art, &ds.correlation, &config).unwrap();
        let serial = validate_cohort(&users, &art, &ds.correlation, &ValidationConfig { workers: 1, ..config.clone() }).unwrap();
        assert_eq!(report, serial);
        for group in [SwbLabel::High, SwbLabel::Low] {
            let all = report.report(group, Criterion::All { m: 5 }).unwrap().fraction;
            let fractions: Vec<f64> = (1..=5).map(|k| report.majority_fraction(group, k)).collect();
            for w in fractions.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert_eq!(fractions[4], all);
            assert!(report.report(group, Criterion::Majority { k: 4 }).unwrap().fraction >= all);
        }
        let table = format_validation_table(&report);
        assert!(table.contains("All (5)") && table.contains("At least 4"));
    }
}
