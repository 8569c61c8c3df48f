//! Personalized activity ranges.
//!
//! The activities that vary most across a cohort are swept over an integer
//! grid on the simplex while the rest stay at a fixed fill. Every grid point
//! is scored by a congruence model, and the per-activity min/max over the
//! points labeled high (whitelist) and low (blacklist) form the ranges.

mod report;
mod simplex;

use serde::{Deserialize, Serialize};

pub use report::{
    format_range_table, plan_grid, recommend, ActivityRangeEntry, FillEntry, RangeMetadata, RangeReport,
};
pub use simplex::{composition_count, next_composition, Compositions};

use crate::classifier::{LinearModel, SwbLabel};
use crate::error::{Error, Result};
use crate::model::{
    congruence_delta, exhibited_personality, ActivityDistribution, CorrelationMatrix,
    PersonalityVector, TRAIT_COUNT,
};
use crate::parallel::map_chunked;

const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecommenderConfig {
    /// Number of varied activities. When unset, every activity whose
    /// proportion std exceeds `variance_threshold` is varied.
    pub m: Option<usize>,
    /// Joint mass of the fixed activities.
    pub lambda: f64,
    pub step: f64,
    pub variance_threshold: Option<f64>,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        RecommenderConfig {
            m: Some(8),
            lambda: 0.1,
            step: 0.1,
            variance_threshold: Some(0.1),
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!("lambda {} outside [0, 1)", self.lambda)));
        }
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidConfig(format!("step {} outside (0, 1]", self.step)));
        }
        if self.m == Some(0) {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.m.is_none() {
            match self.variance_threshold {
                Some(t) if t >= 0.0 && t.is_finite() => {}
                Some(t) => return Err(Error::InvalidConfig(format!("variance threshold {t} must be >= 0"))),
                None => return Err(Error::InvalidConfig("either m or a variance threshold is required".into())),
            }
        }
        Ok(())
    }

    /// Grid for a selection; lambda collapses to 0 when nothing is fixed.
    pub fn grid(&self, selection: &Selection) -> Result<GridSpec> {
        self.validate()?;
        let lambda = if selection.fixed.is_empty() { 0.0 } else { self.lambda };
        GridSpec::new(lambda, self.step)
    }
}

/// Integer grid over the varied activities: `total_units` units of `step`
/// each, summing to `1 − lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lambda: f64,
    pub step: f64,
    pub total_units: u32,
    /// `1 / step` when that is an integer, so units convert by exact division.
    per_unit_denominator: Option<u32>,
}

impl GridSpec {
    pub fn new(lambda: f64, step: f64) -> Result<Self> {
        let ratio = (1.0 - lambda) / step;
        let units = ratio.round();
        if (ratio - units).abs() > GRID_TOLERANCE || units < 1.0 || units > u32::MAX as f64 {
            return Err(Error::NonIntegralGrid(ratio));
        }
        let inverse = 1.0 / step;
        let per_unit_denominator = ((inverse - inverse.round()).abs() <= GRID_TOLERANCE
            && inverse.round() <= u32::MAX as f64)
            .then(|| inverse.round() as u32);
        Ok(GridSpec {
            lambda,
            step,
            total_units: units as u32,
            per_unit_denominator,
        })
    }

    pub fn proportion(&self, units: u32) -> f64 {
        match self.per_unit_denominator {
            Some(d) => units as f64 / d as f64,
            None => units as f64 * self.step,
        }
    }

    pub fn point_count(&self, m: usize) -> u128 {
        composition_count(m, self.total_units)
    }
}

/// Per-activity mean and population standard deviation of proportions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ActivityStats {
    pub fn from_distributions<'a>(
        dists: impl IntoIterator<Item = &'a ActivityDistribution>,
    ) -> Result<Self> {
        let dists: Vec<&ActivityDistribution> = dists.into_iter().collect();
        let Some(first) = dists.first() else {
            return Err(Error::EmptyCohort);
        };
        let n = first.len();
        let count = dists.len() as f64;
        let mut mean = vec![0.0; n];
        for d in &dists {
            if d.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: d.len() });
            }
            for (m, v) in mean.iter_mut().zip(d.as_slice()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= count);
        let mut std = vec![0.0; n];
        for d in &dists {
            for ((s, v), m) in std.iter_mut().zip(d.as_slice()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        std.iter_mut().for_each(|s| *s = (*s / count).sqrt());
        Ok(ActivityStats { mean, std })
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Varied and fixed activity indices, both ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub varied: Vec<usize>,
    pub fixed: Vec<usize>,
}

pub fn select_high_variance(stats: &ActivityStats, config: &RecommenderConfig) -> Result<Selection> {
    config.validate()?;
    let n = stats.len();
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| stats.std[b].total_cmp(&stats.std[a]).then(a.cmp(&b)));
    let mut varied: Vec<usize> = match config.m {
        Some(m) if m > n => return Err(Error::MTooLarge { m, n }),
        Some(m) => ranked[..m].to_vec(),
        None => {
            let threshold = config.variance_threshold.expect("validated");
            ranked.into_iter().filter(|&i| stats.std[i] > threshold).collect()
        }
    };
    if varied.is_empty() {
        return Err(Error::InvalidConfig("no activity exceeds the variance threshold".into()));
    }
    varied.sort_unstable();
    let fixed = (0..n).filter(|i| varied.binary_search(i).is_err()).collect();
    Ok(Selection { varied, fixed })
}

/// Proportions for the fixed activities (in `fixed` order) summing to `lambda`.
///
/// The user's own proportions are rescaled; without any user mass on the
/// fixed set the cohort means are used, and uniform mass as a last resort.
pub fn build_fill(user: Option<&ActivityDistribution>, fixed: &[usize], lambda: f64, cohort_mean: &[f64]) -> Vec<f64> {
    if lambda == 0.0 || fixed.is_empty() {
        return vec![0.0; fixed.len()];
    }
    let rescale = |source: &dyn Fn(usize) -> f64| -> Option<Vec<f64>> {
        let mass: f64 = fixed.iter().map(|&i| source(i)).sum();
        (mass > 0.0).then(|| fixed.iter().map(|&i| source(i) / mass * lambda).collect())
    };
    user.and_then(|u| rescale(&|i| u[i]))
        .or_else(|| rescale(&|i| cohort_mean[i]))
        .unwrap_or_else(|| vec![lambda / fixed.len() as f64; fixed.len()])
}

/// Per-activity envelope over the grid points that received one label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityRanges {
    pub label: SwbLabel,
    pub activities: Vec<usize>,
    pub grid: GridSpec,
    /// Number of grid points with this label.
    pub count: u64,
    /// `(min, max)` units per varied activity; `None` when `count` is 0.
    pub bounds: Option<Vec<(u32, u32)>>,
}

impl ActivityRanges {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    /// Bounds as proportions.
    pub fn proportions(&self) -> Option<Vec<(f64, f64)>> {
        self.bounds.as_ref().map(|b| {
            b.iter()
                .map(|&(lo, hi)| (self.grid.proportion(lo), self.grid.proportion(hi)))
                .collect()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedRanges {
    pub whitelist: ActivityRanges,
    pub blacklist: ActivityRanges,
    pub grid_count: u64,
}

/// Inputs that stay constant across the grid for one user.
#[derive(Clone, Debug)]
pub struct SimulationInput<'a> {
    pub personality: PersonalityVector,
    pub selection: &'a Selection,
    /// Fill for `selection.fixed`, in the same order.
    pub fill: &'a [f64],
    pub grid: GridSpec,
    pub correlation: &'a CorrelationMatrix,
    pub median: PersonalityVector,
}

impl SimulationInput<'_> {
    /// Full distribution for a grid point.
    pub fn distribution(&self, units: &[u32]) -> Result<ActivityDistribution> {
        let mut dist = vec![0.0; self.correlation.columns()];
        for (&i, &u) in self.selection.varied.iter().zip(units) {
            dist[i] = self.grid.proportion(u);
        }
        for (&i, &v) in self.selection.fixed.iter().zip(self.fill) {
            dist[i] = v;
        }
        ActivityDistribution::new(dist)
    }

    /// Model label and margin at a grid point.
    pub fn score(&self, units: &[u32], model: &LinearModel) -> Result<(SwbLabel, f64)> {
        let dist = self.distribution(units)?;
        let exhibited = exhibited_personality(&dist, self.correlation, &self.median)?;
        let delta = congruence_delta(&self.personality, &exhibited)?;
        model.predict(&delta.0)
    }
}

#[derive(Clone, Debug, Default)]
struct Envelope {
    count: u64,
    bounds: Option<Vec<(u32, u32)>>,
}

impl Envelope {
    fn add(&mut self, units: &[u32]) {
        self.count += 1;
        match &mut self.bounds {
            None => self.bounds = Some(units.iter().map(|&u| (u, u)).collect()),
            Some(b) => {
                for (slot, &u) in b.iter_mut().zip(units) {
                    slot.0 = slot.0.min(u);
                    slot.1 = slot.1.max(u);
                }
            }
        }
    }

    fn merge(mut self, other: Envelope) -> Envelope {
        self.count += other.count;
        self.bounds = match (self.bounds, other.bounds) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| (x.0.min(y.0), x.1.max(y.1)))
                    .collect(),
            ),
        };
        self
    }
}

/// Scores every grid point and collects the high/low envelopes.
///
/// Work is split by the first varied activity's units, so the result does not
/// depend on `workers`.
pub fn simulate_ranges(input: &SimulationInput<'_>, model: &LinearModel, workers: usize) -> Result<SimulatedRanges> {
    let m = input.selection.varied.len();
    if m == 0 {
        return Err(Error::EmptyGrid);
    }
    if model.dim() != TRAIT_COUNT {
        return Err(Error::DimensionMismatch(format!(
            "range simulation needs a {TRAIT_COUNT}-feature congruence model, got {}",
            model.dim()
        )));
    }
    if input.fill.len() != input.selection.fixed.len() {
        return Err(Error::LengthMismatch {
            expected: input.selection.fixed.len(),
            actual: input.fill.len(),
        });
    }
    input.personality.validate_reported()?;

    let total = input.grid.total_units;
    let firsts: Vec<u32> = if m == 1 { vec![total] } else { (0..=total).collect() };
    let partials = map_chunked(&firsts, workers, |&first| {
        let (mut high, mut low) = (Envelope::default(), Envelope::default());
        for units in Compositions::with_prefix(m, total, first) {
            match input.score(&units, model)?.0 {
                SwbLabel::High => high.add(&units),
                SwbLabel::Low => low.add(&units),
            }
        }
        Ok((high, low))
    })?;
    let (high, low) = partials
        .into_iter()
        .fold((Envelope::default(), Envelope::default()), |(h, l), (ph, pl)| (h.merge(ph), l.merge(pl)));
    let grid_count = high.count + low.count;
    if grid_count == 0 {
        return Err(Error::EmptyGrid);
    }
    let ranges = |label, env: Envelope| ActivityRanges {
        label,
        activities: input.selection.varied.clone(),
        grid: input.grid,
        count: env.count,
        bounds: env.bounds,
    };
    Ok(SimulatedRanges {
        whitelist: ranges(SwbLabel::High, high),
        blacklist: ranges(SwbLabel::Low, low),
        grid_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Trait;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn selection(n: usize, varied: &[usize]) -> Selection {
        Selection {
            varied: varied.to_vec(),
            fixed: (0..n).filter(|i| !varied.contains(i)).collect(),
        }
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> CorrelationMatrix {
        CorrelationMatrix::new(std::array::from_fn(|_| (0..n).map(|_| rng.random_range(-0.3..0.3)).collect())).unwrap()
    }

    #[test]
    fn grid_arithmetic() {
        let g = GridSpec::new(0.1, 0.1).unwrap();
        assert_eq!(g.total_units, 9);
        assert_eq!(g.proportion(3), 0.3);
        assert_eq!(g.point_count(8), 11_440);
        assert!(matches!(GridSpec::new(0.15, 0.1), Err(Error::NonIntegralGrid(_))));
        assert_eq!(GridSpec::new(0.0, 0.05).unwrap().total_units, 20);
        let odd = GridSpec::new(0.0, 0.25).unwrap();
        assert_eq!(odd.proportion(3), 0.75);
        for u in 0..=20 {
            let p = GridSpec::new(0.0, 0.05).unwrap().proportion(u);
            assert!((p - u as f64 * 0.05).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            RecommenderConfig { lambda: 1.0, ..Default::default() },
            RecommenderConfig { step: 0.0, ..Default::default() },
            RecommenderConfig { m: Some(0), ..Default::default() },
            RecommenderConfig { m: None, variance_threshold: None, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn selection_picks_the_varying_activity() {
        let dists: Vec<ActivityDistribution> = (0..10)
            .map(|i| {
                let a = 0.1 + 0.05 * i as f64;
                ActivityDistribution::new(vec![0.2, a, 0.8 - a]).unwrap()
            })
            .collect();
        let mut stats = ActivityStats::from_distributions(&dists).unwrap();
        stats.std[2] = 0.0; // only index 1 varies
        let sel = select_high_variance(&stats, &RecommenderConfig { m: Some(1), ..Default::default() }).unwrap();
        assert_eq!(sel, selection(3, &[1]));
        let all = select_high_variance(&stats, &RecommenderConfig { m: Some(3), ..Default::default() }).unwrap();
        assert!(all.fixed.is_empty());
        let cfg = RecommenderConfig { m: Some(3), ..Default::default() };
        assert_eq!(cfg.grid(&all).unwrap().lambda, 0.0);
        assert_eq!(cfg.grid(&all).unwrap().total_units, 10);
        assert!(matches!(
            select_high_variance(&stats, &RecommenderConfig { m: Some(4), ..Default::default() }),
            Err(Error::MTooLarge { m: 4, n: 3 })
        ));
    }

    #[test]
    fn selection_matches_direct_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let n = 15;
        let dists: Vec<ActivityDistribution> = (0..50)
            .map(|_| {
                let raw: Vec<f64> = (0..n).map(|i| rng.random_range(0.0..1.0) * (1.0 + i as f64 % 4.0)).collect();
                let s: f64 = raw.iter().sum();
                ActivityDistribution::new(raw.iter().map(|v| v / s).collect()).unwrap()
            })
            .collect();
        let stats = ActivityStats::from_distributions(&dists).unwrap();
        // two-pass oracle
        let mut oracle_std = Vec::new();
        for i in 0..n {
            let col: Vec<f64> = dists.iter().map(|d| d[i]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            oracle_std.push(var.sqrt());
        }
        for i in 0..n {
            assert!((stats.std[i] - oracle_std[i]).abs() < 1e-12);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| oracle_std[b].partial_cmp(&oracle_std[a]).unwrap());
        let mut expected = order[..8].to_vec();
        expected.sort();
        let sel = select_high_variance(&stats, &RecommenderConfig::default()).unwrap();
        assert_eq!(sel.varied, expected);

        let threshold = RecommenderConfig { m: None, variance_threshold: Some(0.03), ..Default::default() };
        let sel = select_high_variance(&stats, &threshold).unwrap();
        let expected: Vec<usize> = (0..n).filter(|&i| oracle_std[i] > 0.03).collect();
        assert_eq!(sel.varied, expected);
    }

    #[test]
    fn ties_break_by_taxonomy_order() {
        let stats = ActivityStats { mean: vec![0.25; 4], std: vec![0.1, 0.2, 0.2, 0.2] };
        let sel = select_high_variance(&stats, &RecommenderConfig { m: Some(2), ..Default::default() }).unwrap();
        assert_eq!(sel.varied, vec![1, 2]);
    }

    #[test]
    fn fill_rules() {
        let user = ActivityDistribution::new(vec![0.5, 0.1, 0.3, 0.1]).unwrap();
        let mean = [0.25; 4];
        assert_eq!(build_fill(Some(&user), &[1, 3], 0.0, &mean), vec![0.0, 0.0]);
        let fill = build_fill(Some(&user), &[1, 3], 0.1, &mean);
        assert!((fill[0] - 0.05).abs() < 1e-15 && (fill[1] - 0.05).abs() < 1e-15);

        let silent = ActivityDistribution::new(vec![0.6, 0.0, 0.4, 0.0]).unwrap();
        let cohort = [0.4, 0.3, 0.2, 0.1];
        let fill = build_fill(Some(&silent), &[1, 3], 0.2, &cohort);
        assert!((fill[0] - 0.2 * 0.3 / 0.4).abs() < 1e-15);
        assert!((fill[1] - 0.2 * 0.1 / 0.4).abs() < 1e-15);
        assert_eq!(build_fill(None, &[1, 3], 0.2, &cohort), fill);
        assert_eq!(build_fill(Some(&silent), &[1, 3], 0.2, &[0.5, 0.0, 0.5, 0.0]), vec![0.1, 0.1]);
    }

    fn setup(n: usize, varied: &[usize], lambda: f64, step: f64) -> (Selection, GridSpec, CorrelationMatrix) {
        let sel = selection(n, varied);
        let grid = GridSpec::new(if sel.fixed.is_empty() { 0.0 } else { lambda }, step).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        (sel, grid, random_matrix(&mut rng, n))
    }

    #[test]
    fn constant_models_cover_the_whole_simplex() {
        let (sel, grid, c) = setup(6, &[0, 2, 3, 5], 0.1, 0.1);
        let fill = vec![0.05, 0.05];
        let input = SimulationInput {
            personality: PersonalityVector::splat(30.0),
            selection: &sel,
            fill: &fill,
            grid,
            correlation: &c,
            median: PersonalityVector::splat(30.0),
        };
        let high = simulate_ranges(&input, &LinearModel::from_parts(vec![0.0; 5], 1.0), 1).unwrap();
        assert_eq!(high.grid_count, composition_count(4, 9) as u64);
        assert_eq!(high.whitelist.count, high.grid_count);
        assert!(high.blacklist.is_empty());
        for (lo, hi) in high.whitelist.proportions().unwrap() {
            assert_eq!((lo, hi), (0.0, 0.9));
        }
        let low = simulate_ranges(&input, &LinearModel::from_parts(vec![0.0; 5], -1.0), 1).unwrap();
        assert!(low.whitelist.is_empty());
        assert_eq!(low.blacklist.bounds, high.whitelist.bounds);
    }

    #[test]
    fn threshold_model_matches_brute_force() {
        // E depends on activity 1 only; model says high iff the E delta <= 0
        let n = 5;
        let mut rows: [Vec<f64>; 5] = Default::default();
        for (t, row) in rows.iter_mut().enumerate() {
            *row = vec![0.0; n];
            if t == Trait::Extraversion.index() {
                row[1] = 0.8;
            }
        }
        let c = CorrelationMatrix::new(rows).unwrap();
        let sel = selection(n, &[0, 1, 2, 4]);
        let grid = GridSpec::new(0.1, 0.1).unwrap();
        let fill = vec![0.1];
        let model = LinearModel::from_parts(vec![-1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        let input = SimulationInput {
            personality: PersonalityVector::new(36.0, 30.0, 30.0, 30.0, 30.0),
            selection: &sel,
            fill: &fill,
            grid,
            correlation: &c,
            median: PersonalityVector::splat(30.0),
        };
        let got = simulate_ranges(&input, &model, 3).unwrap();

        // independent pass: exhibited E = 30 (1 + 0.8 a1), high iff 36 <= that
        let mut white: Option<Vec<(u32, u32)>> = None;
        let mut black: Option<Vec<(u32, u32)>> = None;
        let (mut nw, mut nb) = (0, 0);
        for a in 0..=9u32 {
            for b in 0..=9 - a {
                for d in 0..=9 - a - b {
                    let units = [a, b, d, 9 - a - b - d];
                    let e_ex = 30.0 * (1.0 + 0.8 * (b as f64 / 10.0));
                    let high = (36.0 - e_ex) / 36.0 <= 0.0;
                    let (slot, count) = if high { (&mut white, &mut nw) } else { (&mut black, &mut nb) };
                    *count += 1;
                    let env = slot.get_or_insert_with(|| units.iter().map(|&u| (u, u)).collect());
                    for (e, &u) in env.iter_mut().zip(&units) {
                        e.0 = e.0.min(u);
                        e.1 = e.1.max(u);
                    }
                }
            }
        }
        assert_eq!(got.whitelist.count, nw);
        assert_eq!(got.blacklist.count, nb);
        assert_eq!(got.whitelist.bounds, white);
        assert_eq!(got.blacklist.bounds, black);
        assert_eq!(got.whitelist.bounds.as_ref().unwrap()[1], (3, 9));
    }

    #[test]
    fn single_point_grid() {
        let (sel, grid, c) = setup(4, &[2], 0.9, 0.1);
        assert_eq!(grid.total_units, 1);
        let fill = vec![0.3, 0.3, 0.3];
        let input = SimulationInput {
            personality: PersonalityVector::splat(25.0),
            selection: &sel,
            fill: &fill,
            grid,
            correlation: &c,
            median: PersonalityVector::splat(30.0),
        };
        let r = simulate_ranges(&input, &LinearModel::from_parts(vec![0.0; 5], 1.0), 4).unwrap();
        assert_eq!(r.grid_count, 1);
        assert_eq!(r.whitelist.proportions().unwrap(), vec![(0.1, 0.1)]);
    }

    fn random_input_parts(seed: u64) -> (Selection, Vec<f64>, CorrelationMatrix, LinearModel, PersonalityVector) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 7;
        let c = random_matrix(&mut rng, n);
        let sel = selection(n, &[0, 1, 3, 6]);
        let fill = vec![0.1 / 3.0; 3];
        let w: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let model = LinearModel::from_parts(w, rng.random_range(-0.05..0.05));
        let p = PersonalityVector(std::array::from_fn(|_| rng.random_range(15.0..45.0)));
        (sel, fill, c, model, p)
    }

    #[test]
    fn workers_and_invariants() {
        for seed in 0..5 {
            let (sel, fill, c, model, p) = random_input_parts(seed);
            let grid = GridSpec::new(0.1, 0.1).unwrap();
            let input = SimulationInput {
                personality: p,
                selection: &sel,
                fill: &fill,
                grid,
                correlation: &c,
                median: PersonalityVector::splat(30.0),
            };
            let serial = simulate_ranges(&input, &model, 1).unwrap();
            for workers in [2, 4, 16] {
                assert_eq!(simulate_ranges(&input, &model, workers).unwrap(), serial);
            }
            assert_eq!(serial.whitelist.count + serial.blacklist.count, composition_count(4, 9) as u64);
            // every high point sits inside the whitelist envelope
            for units in Compositions::new(4, 9) {
                let (label, _) = input.score(&units, &model).unwrap();
                let env = match label {
                    SwbLabel::High => &serial.whitelist,
                    SwbLabel::Low => &serial.blacklist,
                };
                for (u, (lo, hi)) in units.iter().zip(env.bounds.as_ref().unwrap()) {
                    assert!(lo <= u && u <= hi);
                }
            }
        }
    }

    #[test]
    fn finer_step_refines_envelopes() {
        for seed in 0..5 {
            let (sel, fill, c, model, p) = random_input_parts(seed + 100);
            let run = |step: f64| {
                let input = SimulationInput {
                    personality: p,
                    selection: &sel,
                    fill: &fill,
                    grid: GridSpec::new(0.1, step).unwrap(),
                    correlation: &c,
                    median: PersonalityVector::splat(30.0),
                };
                simulate_ranges(&input, &model, 2).unwrap()
            };
            let (coarse, fine) = (run(0.1), run(0.05));
            for (a, b) in [(&coarse.whitelist, &fine.whitelist), (&coarse.blacklist, &fine.blacklist)] {
                if let Some(outer) = a.proportions() {
                    let inner = b.proportions().expect("finer grid contains the coarse points");
                    for ((clo, chi), (flo, fhi)) in outer.iter().zip(&inner) {
                        assert!(flo - 1e-12 <= *clo && *chi <= fhi + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_congruence_models() {
        let (sel, grid, c) = setup(4, &[0, 1], 0.2, 0.1);
        let fill = vec![0.1, 0.1];
        let input = SimulationInput {
            personality: PersonalityVector::splat(30.0),
            selection: &sel,
            fill: &fill,
            grid,
            correlation: &c,
            median: PersonalityVector::splat(30.0),
        };
        let model = LinearModel::from_parts(vec![0.0; 4], 1.0);
        assert!(matches!(simulate_ranges(&input, &model, 1), Err(Error::DimensionMismatch(_))));
    }
}
