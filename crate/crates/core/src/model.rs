//! Congruence user model.
//!
//! A user's *reported* personality comes from the Big-Five questionnaire. The
//! *exhibited* personality is implied by how the user spends their time:
//!
//! ```text
//! w    = C · act
//! p_ex = p_median ⊙ (1 + w)
//! p_Δ  = (p_r − p_ex) / p_r
//! ```
//!
//! where `C` is the 5×n trait/activity correlation table and `act` the
//! normalized activity distribution. Smaller deltas mean behavior that is more
//! congruent with the reported personality.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRAIT_COUNT: usize = 5;

/// Lower bound of a reported trait score.
pub const REPORTED_MIN: f64 = 10.0;
/// Upper bound of a reported trait score.
pub const REPORTED_MAX: f64 = 50.0;
/// Midpoint of the reported scale, used when the median anchor is overridden.
pub const SCALE_MIDPOINT: f64 = 30.0;

/// Absolute tolerance on the sum of an activity distribution.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trait {
    Extraversion,
    Agreeableness,
    Conscientiousness,
    Neuroticism,
    Openness,
}

impl Trait {
    pub const ALL: [Trait; TRAIT_COUNT] = [
        Trait::Extraversion,
        Trait::Agreeableness,
        Trait::Conscientiousness,
        Trait::Neuroticism,
        Trait::Openness,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// One-letter label (`E`, `A`, `C`, `N`, `O`).
    pub fn label(self) -> &'static str {
        match self {
            Trait::Extraversion => "E",
            Trait::Agreeableness => "A",
            Trait::Conscientiousness => "C",
            Trait::Neuroticism => "N",
            Trait::Openness => "O",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Trait::Extraversion => "extraversion",
            Trait::Agreeableness => "agreeableness",
            Trait::Conscientiousness => "conscientiousness",
            Trait::Neuroticism => "neuroticism",
            Trait::Openness => "openness",
        }
    }

    pub fn from_label(label: &str) -> Option<Trait> {
        Trait::ALL.into_iter().find(|t| t.label() == label)
    }
}

impl fmt::Display for Trait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Five trait scores in (E, A, C, N, O) order.
///
/// Used for reported, median and exhibited personalities. Only reported
/// vectors are bound to the questionnaire scale; exhibited ones may leave it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersonalityVector(pub [f64; TRAIT_COUNT]);

impl PersonalityVector {
    pub fn new(
        extraversion: f64,
        agreeableness: f64,
        conscientiousness: f64,
        neuroticism: f64,
        openness: f64,
    ) -> Self {
        PersonalityVector([
            extraversion,
            agreeableness,
            conscientiousness,
            neuroticism,
            openness,
        ])
    }

    pub fn splat(value: f64) -> Self {
        PersonalityVector([value; TRAIT_COUNT])
    }

    /// Builds a reported personality, checking every score lies in [10, 50].
    pub fn reported(values: [f64; TRAIT_COUNT]) -> Result<Self> {
        let p = PersonalityVector(values);
        p.validate_reported()?;
        Ok(p)
    }

    pub fn validate_reported(&self) -> Result<()> {
        for t in Trait::ALL {
            let v = self[t];
            if !(REPORTED_MIN..=REPORTED_MAX).contains(&v) {
                return Err(Error::InvalidReportedPersonality(format!("{t} = {v}")));
            }
        }
        Ok(())
    }

    pub fn get(&self, t: Trait) -> f64 {
        self.0[t.index()]
    }

    pub fn as_array(&self) -> &[f64; TRAIT_COUNT] {
        &self.0
    }
}

impl Index<Trait> for PersonalityVector {
    type Output = f64;

    fn index(&self, t: Trait) -> &f64 {
        &self.0[t.index()]
    }
}

/// Normalized activity proportions indexed by taxonomy category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActivityDistribution(Vec<f64>);

impl ActivityDistribution {
    /// Validates non-negativity and a unit sum within [`SIMPLEX_TOLERANCE`].
    pub fn new(proportions: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(proportions, SIMPLEX_TOLERANCE)
    }

    /// Like [`ActivityDistribution::new`] with a caller-chosen sum tolerance.
    pub fn with_tolerance(proportions: Vec<f64>, tolerance: f64) -> Result<Self> {
        if proportions.is_empty() {
            return Err(Error::InvalidDistribution("no categories".into()));
        }
        if let Some((i, v)) = proportions
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "component {i} = {v} is not a non-negative number"
            )));
        }
        let sum: f64 = proportions.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::InvalidDistribution(format!(
                "components sum to {sum}, expected 1"
            )));
        }
        Ok(ActivityDistribution(proportions))
    }

    pub fn one_hot(n: usize, k: usize) -> Self {
        assert!(k < n, "category {k} out of range for {n} categories");
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        ActivityDistribution(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ActivityDistribution {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ActivityDistribution::new(v)
    }
}

impl From<ActivityDistribution> for Vec<f64> {
    fn from(d: ActivityDistribution) -> Vec<f64> {
        d.0
    }
}

impl Index<usize> for ActivityDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Trait × activity correlation table, rows in (E, A, C, N, O) order and
/// columns in taxonomy order.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    columns: usize,
    // row-major, TRAIT_COUNT rows
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn new(rows: [Vec<f64>; TRAIT_COUNT]) -> Result<Self> {
        let columns = rows[0].len();
        if columns == 0 {
            return Err(Error::InvalidCorrelation("no activity columns".into()));
        }
        let mut values = Vec::with_capacity(columns * TRAIT_COUNT);
        for (t, row) in Trait::ALL.iter().zip(rows.iter()) {
            if row.len() != columns {
                return Err(Error::InvalidCorrelation(format!(
                    "row {} has {} columns, expected {columns}",
                    t.label(),
                    row.len()
                )));
            }
            for (i, v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(v) {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({}, {i}) = {v} outside [-1, 1]",
                        t.label()
                    )));
                }
            }
            values.extend_from_slice(row);
        }
        Ok(CorrelationMatrix { columns, values })
    }

    pub fn zeros(columns: usize) -> Self {
        CorrelationMatrix {
            columns,
            values: vec![0.0; columns * TRAIT_COUNT],
        }
    }

    /// Number of activity categories.
    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn get(&self, t: Trait, activity: usize) -> f64 {
        self.values[t.index() * self.columns + activity]
    }

    pub fn row(&self, t: Trait) -> &[f64] {
        let start = t.index() * self.columns;
        &self.values[start..start + self.columns]
    }

    pub fn column(&self, activity: usize) -> [f64; TRAIT_COUNT] {
        Trait::ALL.map(|t| self.get(t, activity))
    }

    pub fn rows(&self) -> [Vec<f64>; TRAIT_COUNT] {
        Trait::ALL.map(|t| self.row(t).to_vec())
    }

    /// Reorders columns: column `i` of the result is column `order[i]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.columns {
            return Err(Error::LengthMismatch {
                expected: self.columns,
                actual: order.len(),
            });
        }
        let rows = Trait::ALL.map(|t| order.iter().map(|&j| self.get(t, j)).collect());
        CorrelationMatrix::new(rows)
    }
}

/// Accumulated effect of a user's activities on each trait.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub [f64; TRAIT_COUNT]);

/// Per-trait normalized gap between reported and exhibited personality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeltaVector(pub [f64; TRAIT_COUNT]);

impl DeltaVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn normalize_activity_counts(counts: &[u32], n: usize) -> Result<ActivityDistribution> {
    if counts.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: counts.len(),
        });
    }
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(Error::AllZeroCounts);
    }
    let total = total as f64;
    Ok(ActivityDistribution(
        counts.iter().map(|&c| f64::from(c) / total).collect(),
    ))
}

pub fn weight_vector(c: &CorrelationMatrix, dist: &ActivityDistribution) -> Result<WeightVector> {
    if c.columns() != dist.len() {
        return Err(Error::DimensionMismatch(format!(
            "correlation matrix has {} columns, distribution has {} components",
            c.columns(),
            dist.len()
        )));
    }
    Ok(WeightVector(Trait::ALL.map(|t| {
        c.row(t)
            .iter()
            .zip(dist.as_slice())
            .map(|(r, p)| r * p)
            .sum()
    })))
}

/// `p_median ⊙ (1 + C·dist)`. Not clamped to the questionnaire scale.
pub fn exhibited_personality(
    dist: &ActivityDistribution,
    c: &CorrelationMatrix,
    median: &PersonalityVector,
) -> Result<PersonalityVector> {
    let w = weight_vector(c, dist)?;
    Ok(PersonalityVector(Trait::ALL.map(|t| {
        median[t] * (1.0 + w.0[t.index()])
    })))
}

pub fn congruence_delta(
    reported: &PersonalityVector,
    exhibited: &PersonalityVector,
) -> Result<DeltaVector> {
    reported.validate_reported()?;
    Ok(DeltaVector(Trait::ALL.map(|t| {
        (reported[t] - exhibited[t]) / reported[t]
    })))
}

/// Per-trait sample median; even-sized cohorts take the mean of the two
/// middle values.
pub fn compute_median_personality(cohort: &[PersonalityVector]) -> Result<PersonalityVector> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let mut column = Vec::with_capacity(cohort.len());
    Ok(PersonalityVector(Trait::ALL.map(|t| {
        column.clear();
        column.extend(cohort.iter().map(|p| p[t]));
        median_in_place(&mut column)
    })))
}

/// Median of a non-empty slice (mean of middle pair when even). Reorders `values`.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// How the median personality anchor is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedianAnchor {
    /// Per-trait median of the training cohort's reported scores.
    #[default]
    CohortMedian,
    /// The questionnaire midpoint (30) for every trait.
    ScaleMidpoint,
}

impl MedianAnchor {
    pub fn resolve(self, cohort: &[PersonalityVector]) -> Result<PersonalityVector> {
        match self {
            MedianAnchor::CohortMedian => compute_median_personality(cohort),
            MedianAnchor::ScaleMidpoint => Ok(PersonalityVector::splat(SCALE_MIDPOINT)),
        }
    }
}
