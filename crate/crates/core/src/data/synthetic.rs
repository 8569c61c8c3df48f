//! Seeded synthetic cohorts with a planted congruence/wellbeing link.

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::classifier::WellbeingScore;
use crate::data::{EmaEvent, ParticipantRecord, Taxonomy};
use crate::error::{Error, Result};
use crate::model::{
    compute_median_personality, congruence_delta, exhibited_personality, median_in_place,
    normalize_activity_counts, CorrelationMatrix, DeltaVector, PersonalityVector, Trait,
    REPORTED_MAX, REPORTED_MIN, SCALE_MIDPOINT, TRAIT_COUNT,
};

/// Summary of a delta vector that drives the planted wellbeing latent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantedStatistic {
    /// Sum of the delta components.
    #[default]
    SignedSum,
    /// Euclidean norm of the delta vector.
    Norm,
}

impl PlantedStatistic {
    pub fn apply(self, delta: &DeltaVector) -> f64 {
        match self {
            PlantedStatistic::SignedSum => delta.sum(),
            PlantedStatistic::Norm => delta.norm(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub cohort_size: usize,
    pub seed: u64,
    /// Standard deviation of the latent noise.
    pub noise_sigma: f64,
    /// How strongly the congruence statistic drives wellbeing.
    pub effect_strength: f64,
    /// Dirichlet concentration for activity propensities.
    pub activity_concentration: f64,
    /// Spread of the per-trait personality draw around the scale midpoint.
    pub personality_sd: f64,
    /// Pull of each user's propensities toward activities that correlate
    /// with their traits. Zero disables it.
    pub personality_tilt: f64,
    pub days: u32,
    pub prompts_per_day: u32,
    pub statistic: PlantedStatistic,
    pub start_date: NaiveDate,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            cohort_size: 150,
            seed: 42,
            noise_sigma: 0.3,
            effect_strength: 4.0,
            activity_concentration: 0.3,
            personality_sd: 4.0,
            personality_tilt: 6.0,
            days: 21,
            prompts_per_day: 5,
            statistic: PlantedStatistic::SignedSum,
            start_date: NaiveDate::from_ymd_opt(2019, 1, 14).expect("valid date"),
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.cohort_size < 10 {
            return bad("cohort size must be at least 10");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise sigma must be finite and >= 0");
        }
        if !self.effect_strength.is_finite() {
            return bad("effect strength must be finite");
        }
        if !(self.activity_concentration > 0.0 && self.activity_concentration.is_finite()) {
            return bad("activity concentration must be positive");
        }
        if !(self.personality_sd > 0.0 && self.personality_sd.is_finite()) {
            return bad("personality sd must be positive");
        }
        if !self.personality_tilt.is_finite() {
            return bad("personality tilt must be finite");
        }
        if self.days == 0 || self.prompts_per_day == 0 {
            return bad("days and prompts per day must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPopulation {
    pub participants: Vec<ParticipantRecord>,
    pub events: Vec<EmaEvent>,
}

const DAY_START_SECS: i64 = 8 * 3600;
const DAY_END_SECS: i64 = 22 * 3600;

pub fn generate_synthetic(
    config: &SyntheticConfig,
    correlation: &CorrelationMatrix,
    taxonomy: &Taxonomy,
) -> Result<SyntheticPopulation> {
    config.validate()?;
    let n = taxonomy.len();
    if correlation.columns() != n {
        return Err(Error::DimensionMismatch(format!(
            "correlation has {} columns, taxonomy has {n} categories",
            correlation.columns()
        )));
    }
    let items: Vec<Vec<&str>> = (0..n).map(|i| taxonomy.items_for(i)).collect();
    if let Some(i) = items.iter().position(Vec::is_empty) {
        return Err(Error::InvalidConfig(format!(
            "category {:?} has no raw items to sample",
            taxonomy.categories[i].id
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let size = config.cohort_size;
    let ids: Vec<String> = (1..=size).map(|j| format!("u{j:04}")).collect();

    let trait_draw = Normal::new(SCALE_MIDPOINT, config.personality_sd)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let personalities: Vec<PersonalityVector> = (0..size)
        .map(|_| {
            PersonalityVector(std::array::from_fn(|_| loop {
                let v = trait_draw.sample(&mut rng).round();
                if (REPORTED_MIN..=REPORTED_MAX).contains(&v) {
                    break v;
                }
            }))
        })
        .collect();

    let gamma = Gamma::new(config.activity_concentration, 1.0)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let propensities: Vec<Vec<f64>> = personalities
        .iter()
        .map(|p| {
            let z: [f64; TRAIT_COUNT] =
                Trait::ALL.map(|t| (p[t] - SCALE_MIDPOINT) / config.personality_sd);
            let mut w: Vec<f64> = (0..n)
                .map(|i| {
                    let pull: f64 = Trait::ALL.iter().map(|&t| correlation.get(t, i) * z[t.index()]).sum();
                    gamma.sample(&mut rng) * (config.personality_tilt * pull).exp()
                })
                .collect();
            let total: f64 = w.iter().sum();
            if total > 0.0 && total.is_finite() {
                w.iter_mut().for_each(|v| *v /= total);
            } else {
                w = vec![1.0 / n as f64; n];
            }
            w
        })
        .collect();

    let start = Utc.from_utc_datetime(&config.start_date.and_hms_opt(0, 0, 0).expect("midnight"));
    let mut events = Vec::with_capacity(size * (config.days * config.prompts_per_day) as usize);
    let mut counts = vec![vec![0u32; n]; size];
    for (j, weights) in propensities.iter().enumerate() {
        let pick = WeightedIndex::new(weights).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for day in 0..config.days {
            let day_start = start + Duration::days(day as i64);
            let mut times: Vec<i64> = (0..config.prompts_per_day)
                .map(|_| rng.random_range(DAY_START_SECS..DAY_END_SECS))
                .collect();
            times.sort_unstable();
            for secs in times {
                let cat = pick.sample(&mut rng);
                let options = &items[cat];
                let item = options[rng.random_range(0..options.len())];
                counts[j][cat] += 1;
                events.push(EmaEvent {
                    user_id: ids[j].clone(),
                    timestamp: day_start + Duration::seconds(secs),
                    item: item.to_string(),
                });
            }
        }
    }

    let median = compute_median_personality(&personalities)?;
    let stats: Vec<f64> = personalities
        .iter()
        .zip(&counts)
        .map(|(p, c)| {
            let dist = normalize_activity_counts(c, n)?;
            let exhibited = exhibited_personality(&dist, correlation, &median)?;
            Ok(config.statistic.apply(&congruence_delta(p, &exhibited)?))
        })
        .collect::<Result<_>>()?;
    let center = median_in_place(&mut stats.clone());
    let mean = stats.iter().sum::<f64>() / size as f64;
    let sd = (stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / size as f64).sqrt();
    let noise = Normal::new(0.0, config.noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut participants = Vec::with_capacity(size);
    for (j, s) in stats.iter().enumerate() {
        let standardized = if sd > 0.0 { (s - center) / sd } else { 0.0 };
        let latent = -config.effect_strength * standardized + noise.sample(&mut rng);
        let p_high = 1.0 / (1.0 + (-latent).exp());
        let score = if rng.random::<f64>() < p_high {
            rng.random_range(6..=10)
        } else {
            rng.random_range(1..=5)
        };
        participants.push(ParticipantRecord {
            user_id: ids[j].clone(),
            personality: personalities[j],
            swb: WellbeingScore::new(score)?,
        });
    }

    Ok(SyntheticPopulation { participants, events })
}
