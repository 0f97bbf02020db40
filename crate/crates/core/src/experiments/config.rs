//! Experiment configuration. A config plus a seed fully determines a run;
//! every report embeds the resolved values.

use crate::quad::QuadratureSpec;
use crate::rng::DEFAULT_SEED;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// experiment name (CLI verbs also set this)
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// scales every check tolerance by this factor when set
    #[serde(default)]
    pub tol_scale: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// per-plane quadrature override
    #[serde(default)]
    pub quad: Option<QuadratureSpec>,
    /// perturbation / commutator epsilon ladders
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    /// matrix dimensions exercised by the oracle suite
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    /// randomized cases per family
    #[serde(default)]
    pub cases: Option<usize>,
    /// Laurent truncation order for the circle calculus
    #[serde(default)]
    pub laurent_order: Option<usize>,
    /// support-scan lattice: [a_min, a_max, b_min, b_max, step]
    #[serde(default)]
    pub lattice: Option<[f64; 5]>,
    /// operator sources for `apply`: inline matrix JSON or file paths
    #[serde(default)]
    pub operators: Option<serde_json::Value>,
    /// function specs for `apply`
    #[serde(default)]
    pub functions: Option<serde_json::Value>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tol_scale(&self) -> f64 {
        self.tol_scale.unwrap_or(1.0)
    }

    pub fn cases(&self) -> usize {
        self.cases.unwrap_or(3)
    }

    pub fn epsilons(&self, default: &[f64]) -> Vec<f64> {
        self.epsilons.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| vec![1, 2, 4, 6, 8])
    }

    pub fn resolved_json(&self, experiment: &str) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v["experiment"] = serde_json::json!(experiment);
        v["seed"] = serde_json::json!(self.seed());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.seed(), 42);
        assert_eq!(cfg.dims(), vec![1, 2, 4, 6, 8]);
        assert_eq!(cfg.epsilons(&[0.1]), vec![0.1]);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str("{\"sede\": 1}");
        assert!(r.is_err());
    }
}
