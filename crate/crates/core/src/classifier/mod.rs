//! Binary wellbeing classification over the four feature sets.

pub mod bayes;
pub mod features;
pub mod labels;
pub mod loo;
pub mod metrics;
pub mod svm;

pub use bayes::{train_gaussian_nb, GaussianNb};
pub use features::{build_feature_matrix, build_features, features_from_parts, FeatureContext, FeatureSetKind};
pub use labels::{binarize_swb, SwbLabel, WellbeingScore};
pub use loo::{
    format_evaluation_table, loo_evaluate, train_fold, Algorithm, EvaluationConfig,
    EvaluationReport, FoldModel, SamplePrediction, TrainedClassifier,
};
pub use metrics::{auc_rank, cohen_kappa, Confusion};
pub use svm::{hinge_objective, train_linear_svm, LinearModel, Standardizer, SvmParams};
