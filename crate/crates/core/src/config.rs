//! Run configuration for dataset generation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::qsim::StrategyConfig;
use crate::scene::SceneConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
}

/// Fractions of image pairs per split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios { train: 0.8, valid: 0.1, test: 0.1 }
    }
}

/// Everything a generation run depends on. `workers` and `out` never change
/// the output and are left out of the config hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Number of image pairs.
    pub pairs: usize,
    pub seed: u64,
    /// Probability that the answerer lies during generation.
    pub epsilon: f64,
    pub split: SplitRatios,
    pub scene: SceneConfig,
    pub strategy: StrategyConfig,
    /// Directory holding replacement data files; the built-in data otherwise.
    pub data_dir: Option<PathBuf>,
    pub out: PathBuf,
    /// Thread count; all cores when absent.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pairs: 1000,
            seed: 0,
            epsilon: 0.0,
            split: SplitRatios::default(),
            scene: SceneConfig::default(),
            strategy: StrategyConfig::default(),
            data_dir: None,
            out: PathBuf::from("out"),
            workers: None,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

fn probability(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} is not in [0, 1]")))
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be positive")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    /// Rejects the first out-of-range knob, naming it.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pairs == 0 {
            return Err(invalid("pairs", "must be at least 1"));
        }
        probability("epsilon", self.epsilon)?;
        probability("split.train", self.split.train)?;
        probability("split.valid", self.split.valid)?;
        probability("split.test", self.split.test)?;
        let sum = self.split.train + self.split.valid + self.split.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(invalid("split", format!("ratios sum to {sum}, not 1")));
        }
        let s = &self.scene;
        positive("scene.floor", s.floor[0])?;
        positive("scene.floor", s.floor[1])?;
        if s.min_objects == 0 {
            return Err(invalid("scene.min_objects", "must be at least 1"));
        }
        if s.max_objects < s.min_objects {
            return Err(invalid("scene.max_objects", "is below scene.min_objects"));
        }
        if s.sample_points == 0 {
            return Err(invalid("scene.sample_points", "must be at least 1"));
        }
        if !(s.min_gap.is_finite() && s.min_gap >= 0.0) {
            return Err(invalid("scene.min_gap", format!("{} must be non-negative", s.min_gap)));
        }
        if s.max_divergence == 0 {
            return Err(invalid("scene.max_divergence", "must be at least 1"));
        }
        if s.retry_budget == 0 {
            return Err(invalid("scene.retry_budget", "must be at least 1"));
        }
        if s.pair_retry_budget == 0 {
            return Err(invalid("scene.pair_retry_budget", "must be at least 1"));
        }
        probability("scene.different_category_prob", s.different_category_prob)?;
        if !(s.min_footprint_area.is_finite() && s.min_footprint_area >= 0.0) {
            return Err(invalid("scene.min_footprint_area", "must be non-negative"));
        }
        let q = &self.strategy;
        if q.max_rounds == 0 {
            return Err(invalid("strategy.max_rounds", "must be at least 1"));
        }
        if q.candidate_gate == 0 {
            return Err(invalid("strategy.candidate_gate", "must be at least 1"));
        }
        probability("strategy.hint_epsilon", q.hint_epsilon)?;
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        Ok(())
    }

    /// The config as hashed: output-neutral fields cleared.
    pub fn canonical(&self) -> RunConfig {
        RunConfig { out: PathBuf::new(), workers: None, ..self.clone() }
    }

    /// Hex SHA-256 of the canonical config's JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(&self.canonical()).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        let c = RunConfig::from_toml("pairs = 10\nseed = 7\n[scene]\nmin_gap = 0.5\n").unwrap();
        assert_eq!((c.pairs, c.seed, c.scene.min_gap), (10, 7, 0.5));
        assert_eq!(c.strategy.max_rounds, 10);
    }

    #[test]
    fn offending_field_is_named() {
        let err = RunConfig::from_toml("[split]\ntrain = 0.9\n").unwrap_err();
        assert!(err.to_string().contains("`split`"), "{err}");
        let err = RunConfig::from_toml("[scene]\nmin_objects = 9\nmax_objects = 4\n").unwrap_err();
        assert!(err.to_string().contains("scene.max_objects"), "{err}");
        let err = RunConfig::from_toml("epsilon = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
        assert!(matches!(RunConfig::from_toml("bogus = 1\n"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn digest_ignores_workers_and_out() {
        let a = RunConfig::default();
        let b = RunConfig { workers: Some(3), out: "elsewhere".into(), ..a.clone() };
        assert_eq!(a.digest(), b.digest());
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
