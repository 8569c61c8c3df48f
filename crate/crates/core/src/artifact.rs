//! Trained-model artifact: a versioned JSON document carrying everything
//! needed to classify new users and to simulate their activity ranges.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{
    binarize_swb, build_features, features_from_parts, train_linear_svm, FeatureContext,
    FeatureSetKind, LinearModel, SvmParams, SwbLabel,
};
use crate::data::{correlation_fingerprint, Taxonomy, UserRecord};
use crate::error::{Error, Result};
use crate::model::{
    congruence_delta, exhibited_personality, ActivityDistribution, CorrelationMatrix, DeltaVector,
    MedianAnchor, PersonalityVector,
};
use crate::recommender::ActivityStats;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub feature_kind: FeatureSetKind,
    pub taxonomy_hash: String,
    pub correlation_hash: String,
    pub category_ids: Vec<String>,
    pub median: PersonalityVector,
    pub median_anchor: MedianAnchor,
    /// SWB median used to label the training cohort.
    pub swb_threshold: f64,
    pub model: LinearModel,
    pub hyperparameters: SvmParams,
    pub seed: u64,
    pub training_size: usize,
    /// Activity statistics of the training cohort, used to pick the varied
    /// activities and the fallback fill when recommending.
    pub activity_stats: ActivityStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: SwbLabel,
    pub margin: f64,
    pub delta: DeltaVector,
    pub exhibited: PersonalityVector,
}

/// Fits a linear SVM on the whole cohort.
pub fn train_artifact(
    cohort: &[UserRecord],
    kind: FeatureSetKind,
    taxonomy: &Taxonomy,
    correlation: &CorrelationMatrix,
    params: &SvmParams,
    anchor: MedianAnchor,
) -> Result<ModelArtifact> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    if correlation.columns() != taxonomy.len() {
        return Err(Error::DimensionMismatch(format!(
            "correlation has {} columns, taxonomy has {} categories",
            correlation.columns(),
            taxonomy.len()
        )));
    }
    let scores: Vec<_> = cohort.iter().map(|u| u.swb).collect();
    let (labels, swb_threshold) = binarize_swb(&scores)?;
    let personalities: Vec<PersonalityVector> = cohort.iter().map(|u| u.personality).collect();
    let median = anchor.resolve(&personalities)?;
    let ctx = FeatureContext { correlation, median };
    let x = cohort
        .iter()
        .map(|u| build_features(u, kind, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let model = train_linear_svm(&x, &labels, params)?;
    Ok(ModelArtifact {
        format_version: FORMAT_VERSION,
        feature_kind: kind,
        taxonomy_hash: taxonomy.fingerprint(),
        correlation_hash: correlation_fingerprint(correlation, taxonomy),
        category_ids: taxonomy.ids().into_iter().map(String::from).collect(),
        median,
        median_anchor: anchor,
        swb_threshold,
        model,
        hyperparameters: *params,
        seed: params.seed,
        training_size: cohort.len(),
        activity_stats: ActivityStats::from_distributions(cohort.iter().map(|u| &u.activity))?,
    })
}

impl ModelArtifact {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_str(text)?;
        if v.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(v.format_version));
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        ModelArtifact::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the serialized artifact.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Checks that the artifact was trained against these exact inputs.
    pub fn check_inputs(&self, taxonomy: &Taxonomy, correlation: &CorrelationMatrix) -> Result<()> {
        if self.taxonomy_hash != taxonomy.fingerprint() {
            return Err(Error::ArtifactMismatch("taxonomy differs from the one used in training".into()));
        }
        if self.correlation_hash != correlation_fingerprint(correlation, taxonomy) {
            return Err(Error::ArtifactMismatch(
                "correlation matrix differs from the one used in training".into(),
            ));
        }
        Ok(())
    }

    pub fn require_congruence(&self) -> Result<()> {
        if self.feature_kind != FeatureSetKind::Congruence {
            return Err(Error::WrongFeatureKind(self.feature_kind.to_string()));
        }
        Ok(())
    }

    pub fn classify(
        &self,
        personality: &PersonalityVector,
        activity: &ActivityDistribution,
        correlation: &CorrelationMatrix,
    ) -> Result<Classification> {
        personality.validate_reported()?;
        let exhibited = exhibited_personality(activity, correlation, &self.median)?;
        let delta = congruence_delta(personality, &exhibited)?;
        let x = match self.feature_kind {
            FeatureSetKind::Congruence => delta.0.to_vec(),
            kind => {
                let ctx = FeatureContext { correlation, median: self.median };
                features_from_parts(personality, activity, kind, &ctx)?
            }
        };
        let (label, margin) = self.model.predict(&x)?;
        Ok(Classification {
            label,
            margin,
            delta,
            exhibited,
        })
    }
}
