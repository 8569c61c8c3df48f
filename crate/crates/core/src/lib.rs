//! Personality/activity congruence modeling: exhibited personality, wellbeing
//! classifiers, activity range recommendations and their validation.

pub mod artifact;
pub mod classifier;
pub mod data;
pub mod error;
pub mod model;
mod parallel;
pub mod recommender;
pub mod validation;

pub use error::{Error, Result};
pub use model::{
    compute_median_personality, congruence_delta, exhibited_personality, normalize_activity_counts,
    weight_vector, ActivityDistribution, CorrelationMatrix, DeltaVector, MedianAnchor,
    PersonalityVector, Trait, WeightVector,
};

pub use artifact::{train_artifact, Classification, ModelArtifact};
pub use classifier::{FeatureSetKind, LinearModel, SvmParams, SwbLabel, WellbeingScore};
pub use data::{Dataset, Taxonomy, UserRecord};
pub use recommender::{recommend, RangeReport, RecommenderConfig};
pub use validation::{validate_cohort, ValidationConfig, ValidationReport};
