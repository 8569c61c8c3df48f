//! Shared fixtures for the benchmarks.

use congrec::classifier::{binarize_swb, build_feature_matrix, FeatureContext, SwbLabel};
use congrec::data::{builtin_correlation, generate_synthetic, Dataset, SyntheticConfig, Taxonomy, UnknownItemPolicy};
use congrec::model::compute_median_personality;
use congrec::{train_artifact, FeatureSetKind, MedianAnchor, ModelArtifact, SvmParams, UserRecord};

/// The default planted synthetic cohort (150 users, seed 42).
pub struct Fixture {
    pub dataset: Dataset,
    pub cohort: Vec<UserRecord>,
    pub artifact: ModelArtifact,
}

impl Fixture {
    pub fn planted() -> Self {
        let taxonomy = Taxonomy::builtin();
        let correlation = builtin_correlation(&taxonomy).expect("built-in correlation matrix");
        let pop = generate_synthetic(&SyntheticConfig::default(), &correlation, &taxonomy).expect("synthetic cohort");
        let dataset = Dataset {
            taxonomy,
            correlation,
            participants: pop.participants,
            events: pop.events,
        };
        let cohort = dataset.cohort(UnknownItemPolicy::Strict).expect("cohort joins");
        let artifact = train_artifact(
            &cohort,
            FeatureSetKind::Congruence,
            &dataset.taxonomy,
            &dataset.correlation,
            &SvmParams::default(),
            MedianAnchor::CohortMedian,
        )
        .expect("artifact trains");
        Fixture {
            dataset,
            cohort,
            artifact,
        }
    }

    /// Feature rows and labels for training on the whole cohort.
    pub fn training_set(&self, kind: FeatureSetKind) -> (Vec<Vec<f64>>, Vec<SwbLabel>) {
        let personalities: Vec<_> = self.cohort.iter().map(|u| u.personality).collect();
        let median = compute_median_personality(&personalities).expect("median");
        let ctx = FeatureContext {
            correlation: &self.dataset.correlation,
            median,
        };
        let users: Vec<&UserRecord> = self.cohort.iter().collect();
        let x = build_feature_matrix(&users, kind, &ctx).expect("features");
        let scores: Vec<_> = self.cohort.iter().map(|u| u.swb).collect();
        let (y, _) = binarize_swb(&scores).expect("labels");
        (x, y)
    }
}
