//! Training hyperparameters and their JSON document.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::CategoricalScore;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Sgd,
    Adam,
}

/// Hyperparameters of a training run. Every field has a default; the JSON
/// form rejects unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub population: usize,
    /// Fixed standard deviation of every `[Real]` hole's Gaussian.
    pub sigma: f64,
    /// Initial mean of every `[Real]` hole's Gaussian.
    pub mu_init: f64,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub categorical_score: CategoricalScore,
    /// Loss substituted for candidates with non-finite predictions.
    pub penalty: f64,
    /// Loss-log row interval.
    pub log_every: usize,
    /// Evaluate candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            iterations: 10_000,
            population: 50,
            sigma: 0.5,
            mu_init: 0.0,
            seed: 0,
            optimizer: OptimizerKind::Sgd,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            categorical_score: CategoricalScore::SoftmaxGrad,
            penalty: crate::interp::DEFAULT_PENALTY,
            log_every: 10,
            parallel: true,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("`{name}` must be finite and > 0, got {v}")))
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        positive("learning_rate", self.learning_rate)?;
        positive("sigma", self.sigma)?;
        positive("penalty", self.penalty)?;
        positive("adam_eps", self.adam_eps)?;
        if self.iterations < 1 {
            return Err(Error::Config("`iterations` must be >= 1".into()));
        }
        if self.population < 2 {
            return Err(Error::Config(format!(
                "`population` must be >= 2, got {}",
                self.population
            )));
        }
        if self.population > u16::MAX as usize {
            return Err(Error::Config(format!(
                "`population` must be <= {}, got {}",
                u16::MAX,
                self.population
            )));
        }
        if self.log_every < 1 {
            return Err(Error::Config("`log_every` must be >= 1".into()));
        }
        if !self.mu_init.is_finite() {
            return Err(Error::Config("`mu_init` must be finite".into()));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Config(format!("`{name}` must lie in [0, 1), got {b}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: TrainConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<TrainConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TrainConfig::from_json(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
