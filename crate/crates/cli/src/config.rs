use std::path::Path;

use anyhow::Context;
use congrec::classifier::{Algorithm, EvaluationConfig};
use congrec::data::{PlantedStatistic, SyntheticConfig, UnknownItemPolicy};
use congrec::{MedianAnchor, RecommenderConfig, SvmParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{CommonArgs, RecommenderArgs, SvmArgs};
use crate::error::CliError;

/// Everything a run depends on besides its input files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub features: Option<String>,
    pub classifier: Algorithm,
    pub svm: SvmParams,
    pub median_anchor: MedianAnchor,
    pub recommender: RecommenderConfig,
    pub k: Option<usize>,
    pub unknown_items: UnknownItemPolicy,
    pub synthetic: SyntheticConfig,
    pub grid_cap: u128,
    pub cors_origins: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            workers: 1,
            features: None,
            classifier: Algorithm::default(),
            svm: SvmParams::default(),
            median_anchor: MedianAnchor::default(),
            recommender: RecommenderConfig::default(),
            k: None,
            unknown_items: UnknownItemPolicy::Lenient,
            synthetic: SyntheticConfig::default(),
            grid_cap: congrec_service::DEFAULT_GRID_CAP,
            cors_origins: Vec::new(),
        }
    }
}

/// Reads a config file. A manifest is accepted too; its `config` field is used.
pub fn read_config(path: &Path) -> anyhow::Result<(RunConfig, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::new("invalid_config", format!("{}: {e}", path.display())))?;
    if value.get("subcommand").is_some() {
        value = value["config"].take();
    }
    let config = serde_json::from_value(value)
        .map_err(|e| CliError::new("invalid_config", format!("{}: {e}", path.display())))?;
    Ok((config, bytes))
}

/// Parses a snake_case enum name the same way the config file would.
pub fn parse_name<T: DeserializeOwned>(flag: &str, name: &str) -> anyhow::Result<T> {
    serde_json::from_value(serde_json::Value::String(name.to_owned()))
        .map_err(|_| CliError::usage(format!("--{flag}: unknown value {name:?}")).into())
}

impl RunConfig {
    pub fn apply_common(&mut self, args: &CommonArgs) {
        if let Some(seed) = args.seed {
            self.seed = seed;
        }
        if let Some(workers) = args.workers {
            self.workers = workers;
        }
        self.svm.seed = self.seed;
        self.synthetic.seed = self.seed;
    }

    pub fn apply_svm(&mut self, args: &SvmArgs) -> anyhow::Result<()> {
        if let Some(c) = args.regularization {
            self.svm.regularization = c;
        }
        if let Some(n) = args.max_iterations {
            self.svm.max_iterations = n;
        }
        if let Some(t) = args.tolerance {
            self.svm.tolerance = t;
        }
        if let Some(a) = &args.median_anchor {
            self.median_anchor = parse_name("median-anchor", a)?;
        }
        Ok(())
    }

    pub fn apply_recommender(&mut self, args: &RecommenderArgs) {
        if args.m.is_some() {
            self.recommender.m = args.m;
        }
        if let Some(lambda) = args.lambda {
            self.recommender.lambda = lambda;
        }
        if let Some(step) = args.step {
            self.recommender.step = step;
        }
        if args.variance_threshold.is_some() {
            self.recommender.variance_threshold = args.variance_threshold;
        }
    }

    pub fn apply_unknown_items(&mut self, policy: Option<&str>) -> anyhow::Result<()> {
        if let Some(p) = policy {
            self.unknown_items = parse_name("unknown-items", p)?;
        }
        Ok(())
    }

    pub fn apply_statistic(&mut self, statistic: Option<&str>) -> anyhow::Result<()> {
        if let Some(s) = statistic {
            self.synthetic.statistic = parse_name::<PlantedStatistic>("statistic", s)?;
        }
        Ok(())
    }

    pub fn evaluation(&self) -> EvaluationConfig {
        EvaluationConfig {
            algorithm: self.classifier,
            svm: self.svm,
            median_anchor: self.median_anchor,
            workers: self.workers.max(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let mut cfg: RunConfig = serde_json::from_str(r#"{"seed": 7, "recommender": {"step": 0.05}}"#).unwrap();
        cfg.apply_common(&CommonArgs { config: None, seed: Some(9), workers: None });
        cfg.apply_recommender(&RecommenderArgs { m: Some(4), lambda: None, step: None, variance_threshold: None });
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.svm.seed, 9);
        assert_eq!(cfg.synthetic.seed, 9);
        assert_eq!(cfg.recommender.step, 0.05);
        assert_eq!(cfg.recommender.m, Some(4));
        assert_eq!(cfg.recommender.lambda, 0.1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 1}"#).is_err());
    }

    #[test]
    fn manifest_config_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, r#"{"subcommand": "train", "config": {"seed": 3}}"#).unwrap();
        assert_eq!(read_config(&path).unwrap().0.seed, 3);
    }
}
