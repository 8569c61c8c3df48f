//! Leave-one-sample-out evaluation.
//!
//! Labels are binarized once on the full cohort. Every fold then refits the
//! median anchor, the standardization and the classifier on the remaining
//! users only, and scores the held-out user with that fold's model.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::bayes::{train_gaussian_nb, GaussianNb};
use crate::classifier::features::{build_features, FeatureContext, FeatureSetKind};
use crate::classifier::metrics::{auc_rank, cohen_kappa, Confusion};
use crate::classifier::svm::{train_linear_svm, LinearModel, SvmParams};
use crate::classifier::{binarize_swb, SwbLabel};
use crate::data::UserRecord;
use crate::error::{Error, Result};
use crate::model::{CorrelationMatrix, MedianAnchor, PersonalityVector};
use crate::parallel::map_chunked;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    LinearSvm,
    GaussianNb,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" | "linear_svm" => Ok(Algorithm::LinearSvm),
            "nb" | "gaussian_nb" => Ok(Algorithm::GaussianNb),
            other => Err(Error::InvalidConfig(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", content = "model", rename_all = "snake_case")]
pub enum TrainedClassifier {
    LinearSvm(LinearModel),
    GaussianNb(GaussianNb),
}

impl TrainedClassifier {
    pub fn train(x: &[Vec<f64>], y: &[SwbLabel], algorithm: Algorithm, svm: &SvmParams) -> Result<Self> {
        Ok(match algorithm {
            Algorithm::LinearSvm => TrainedClassifier::LinearSvm(train_linear_svm(x, y, svm)?),
            Algorithm::GaussianNb => TrainedClassifier::GaussianNb(train_gaussian_nb(x, y)?),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<(SwbLabel, f64)> {
        match self {
            TrainedClassifier::LinearSvm(m) => m.predict(x),
            TrainedClassifier::GaussianNb(m) => m.predict(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    pub algorithm: Algorithm,
    pub svm: SvmParams,
    pub median_anchor: MedianAnchor,
    /// Threads used to run folds; results do not depend on it.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            algorithm: Algorithm::default(),
            svm: SvmParams::default(),
            median_anchor: MedianAnchor::default(),
            workers: 1,
        }
    }
}

/// Everything a fold learned from its training users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldModel {
    pub held_out: usize,
    pub median: PersonalityVector,
    pub classifier: TrainedClassifier,
}

impl FoldModel {
    /// SHA-256 over the serialized fold state.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("fold model serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Trains the fold that holds out `held_out`. The held-out user's record is
/// never read.
pub fn train_fold(
    cohort: &[UserRecord],
    labels: &[SwbLabel],
    held_out: usize,
    kind: FeatureSetKind,
    correlation: &CorrelationMatrix,
    config: &EvaluationConfig,
) -> Result<FoldModel> {
    let train: Vec<&UserRecord> = cohort
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, u)| u)
        .collect();
    let y: Vec<SwbLabel> = labels
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, l)| *l)
        .collect();
    let personalities: Vec<PersonalityVector> = train.iter().map(|u| u.personality).collect();
    let median = config.median_anchor.resolve(&personalities)?;
    let ctx = FeatureContext { correlation, median };
    let x = train
        .iter()
        .map(|u| build_features(u, kind, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let classifier = TrainedClassifier::train(&x, &y, config.algorithm, &config.svm)?;
    Ok(FoldModel {
        held_out,
        median,
        classifier,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePrediction {
    pub user_id: String,
    pub truth: SwbLabel,
    pub predicted: SwbLabel,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub feature_kind: FeatureSetKind,
    pub algorithm: Algorithm,
    pub threshold: f64,
    pub accuracy: f64,
    pub kappa: f64,
    pub auc: f64,
    pub confusion: Confusion,
    pub predictions: Vec<SamplePrediction>,
}

pub fn loo_evaluate(
    cohort: &[UserRecord],
    kind: FeatureSetKind,
    correlation: &CorrelationMatrix,
    config: &EvaluationConfig,
) -> Result<EvaluationReport> {
    if cohort.len() < 3 {
        return Err(Error::DegenerateSplit(format!(
            "leave-one-out needs at least 3 users, got {}",
            cohort.len()
        )));
    }
    let scores: Vec<_> = cohort.iter().map(|u| u.swb).collect();
    let (labels, threshold) = binarize_swb(&scores)?;

    let folds: Vec<usize> = (0..cohort.len()).collect();
    let predictions = map_chunked(&folds, config.workers, |&j| {
        let fold = train_fold(cohort, &labels, j, kind, correlation, config)?;
        let ctx = FeatureContext { correlation, median: fold.median };
        let x = build_features(&cohort[j], kind, &ctx)?;
        let (predicted, margin) = fold.classifier.predict(&x)?;
        Ok(SamplePrediction {
            user_id: cohort[j].user_id.clone(),
            truth: labels[j],
            predicted,
            margin,
        })
    })?;

    let predicted: Vec<SwbLabel> = predictions.iter().map(|p| p.predicted).collect();
    let margins: Vec<f64> = predictions.iter().map(|p| p.margin).collect();
    let confusion = Confusion::from_predictions(&labels, &predicted);
    Ok(EvaluationReport {
        feature_kind: kind,
        algorithm: config.algorithm,
        threshold,
        accuracy: confusion.accuracy(),
        kappa: cohen_kappa(&confusion),
        auc: auc_rank(&margins, &labels)?,
        confusion,
        predictions,
    })
}

/// Aligned text table with one row per feature set.
pub fn format_evaluation_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} | {:>8} | {:>6} | {:>6}", "Model Type (Features)", "Accuracy", "Kappa", "AUC");
    let _ = writeln!(out, "{}", "-".repeat(24 + 3 + 8 + 3 + 6 + 3 + 6));
    for r in reports {
        let _ = writeln!(
            out,
            "{:<24} | {:>7.1}% | {:>6.2} | {:>6.2}",
            r.feature_kind.title(),
            r.accuracy * 100.0,
            r.kappa,
            r.auc
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::WellbeingScore;
    use crate::model::ActivityDistribution;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn user(id: usize, e: f64, swb: u8) -> UserRecord {
        UserRecord {
            user_id: format!("u{id}"),
            personality: PersonalityVector::new(e, 30.0, 30.0, 30.0, 30.0),
            activity: ActivityDistribution::one_hot(2, id % 2),
            swb: WellbeingScore::new(swb).unwrap(),
        }
    }

    #[test]
    fn separated_clusters_score_perfectly() {
        // feature = extraversion; low cluster at 20, high cluster at 40
        let mut cohort = Vec::new();
        for i in 0..5 {
            cohort.push(user(i, 20.0 + i as f64 * 0.1, 2));
            cohort.push(user(i + 5, 40.0 - i as f64 * 0.1, 9));
        }
        let c = CorrelationMatrix::zeros(2);
        let r = loo_evaluate(&cohort, FeatureSetKind::Personality, &c, &EvaluationConfig::default()).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.kappa, 1.0);
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.confusion.total(), 10);
    }

    #[test]
    fn shuffled_labels_sit_at_chance() {
        let mut accuracies = Vec::new();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut swb: Vec<u8> = (0..100).map(|_| rng.random_range(1..=10)).collect();
            swb.shuffle(&mut rng);
            let cohort: Vec<UserRecord> = (0..100)
                .map(|i| {
                    let mut u = user(i, rng.random_range(10.0..50.0), swb[i]);
                    u.personality = PersonalityVector(std::array::from_fn(|_| rng.random_range(10.0..50.0)));
                    u
                })
                .collect();
            let c = CorrelationMatrix::zeros(2);
            let r = loo_evaluate(&cohort, FeatureSetKind::Personality, &c, &EvaluationConfig::default()).unwrap();
            accuracies.push(r.accuracy);
        }
        let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
        assert!((mean - 0.5).abs() <= 0.1, "mean accuracy {mean}");
    }

    #[test]
    fn workers_do_not_change_the_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cohort: Vec<UserRecord> = (0..30)
            .map(|i| user(i, rng.random_range(10.0..50.0), rng.random_range(1..=10)))
            .collect();
        let c = CorrelationMatrix::zeros(2);
        let serial = loo_evaluate(&cohort, FeatureSetKind::PersonalityActivity, &c, &EvaluationConfig::default()).unwrap();
        let config = EvaluationConfig { workers: 4, ..EvaluationConfig::default() };
        let parallel = loo_evaluate(&cohort, FeatureSetKind::PersonalityActivity, &c, &config).unwrap();
        assert_eq!(serde_json::to_string(&serial).unwrap(), serde_json::to_string(&parallel).unwrap());
    }

    #[test]
    fn small_or_degenerate_cohorts_are_rejected() {
        let c = CorrelationMatrix::zeros(2);
        let cohort = vec![user(0, 20.0, 2), user(1, 40.0, 9)];
        assert!(matches!(
            loo_evaluate(&cohort, FeatureSetKind::Personality, &c, &EvaluationConfig::default()),
            Err(Error::DegenerateSplit(_))
        ));
        let cohort = vec![user(0, 20.0, 5), user(1, 40.0, 5), user(2, 30.0, 5)];
        assert!(matches!(
            loo_evaluate(&cohort, FeatureSetKind::Personality, &c, &EvaluationConfig::default()),
            Err(Error::DegenerateSplit(_))
        ));
    }

    #[test]
    fn naive_bayes_runs_through_the_harness() {
        let mut cohort = Vec::new();
        for i in 0..6 {
            cohort.push(user(i, 15.0 + i as f64, 2));
            cohort.push(user(i + 6, 45.0 - i as f64, 9));
        }
        let config = EvaluationConfig { algorithm: Algorithm::GaussianNb, ..EvaluationConfig::default() };
        let r = loo_evaluate(&cohort, FeatureSetKind::Personality, &CorrelationMatrix::zeros(2), &config).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.algorithm, Algorithm::GaussianNb);
    }

    #[test]
    fn table_lists_rows_in_order() {
        let mut cohort = Vec::new();
        for i in 0..5 {
            cohort.push(user(i, 20.0 + i as f64, 2));
            cohort.push(user(i + 5, 40.0 - i as f64, 9));
        }
        let c = CorrelationMatrix::zeros(2);
        let reports: Vec<_> = [FeatureSetKind::Personality, FeatureSetKind::Activity]
            .into_iter()
            .map(|k| loo_evaluate(&cohort, k, &c, &EvaluationConfig::default()).unwrap())
            .collect();
        let table = format_evaluation_table(&reports);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("Model Type (Features)"));
        assert!(lines[2].starts_with("Personality "));
        assert!(lines[3].starts_with("Activity "));
        assert!(lines[2].contains("100.0%"));
    }
}
