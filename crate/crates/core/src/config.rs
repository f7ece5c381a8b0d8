//! Experiment configuration, read from JSON.
//!
//! Every field has a default, so `{}` is a valid configuration. Keys follow
//! the model notation (`"L"`, `"beta1"`, `"bc"`, ...).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::fluctuation::CovarianceOptions;
use crate::lattice::HeightConvention;
use crate::params::ModelParams;
use crate::telegraph::TelegraphOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub scale: u32,
    pub beta1: f64,
    pub beta2: f64,
    pub bc: BoundarySpec,
    /// Macroscopic window side `a`; the lattice window is `[0, aL]^2`.
    pub extent: f64,
    pub seed: u64,
    pub replicas: usize,
    pub convention: HeightConvention,
    /// Macroscopic evaluation points for the fluctuation experiment, inside
    /// `(0, extent)^2`.
    pub points: Vec<(f64, f64)>,
    pub lln: LlnConfig,
    pub verify: VerifyConfig,
    pub thresholds: Thresholds,
    /// Telegraph grid step, also the white-noise cell size.
    pub grid_step: f64,
    pub telegraph: TelegraphOptions,
    pub covariance: CovarianceOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scale: 128,
            beta1: 2.0,
            beta2: 1.0,
            bc: BoundarySpec::Step,
            extent: 1.25,
            seed: 20_241_014,
            replicas: 2000,
            convention: HeightConvention::Standard,
            points: vec![(1.0, 1.0), (0.7, 0.7), (1.2, 0.9)],
            lln: LlnConfig::default(),
            verify: VerifyConfig::default(),
            thresholds: Thresholds::default(),
            grid_step: 1.0 / 64.0,
            telegraph: TelegraphOptions::default(),
            covariance: CovarianceOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlnConfig {
    pub scales: Vec<u32>,
    pub replicas: usize,
    pub extent: f64,
}

impl Default for LlnConfig {
    fn default() -> Self {
        Self {
            scales: vec![64, 128, 256],
            replicas: 21,
            extent: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// `(b1, b2)` pairs for the enumeration oracle.
    pub weights: Vec<(f64, f64)>,
    pub exact_window: usize,
    pub reconstruction_scale: u32,
    pub reconstruction_window: usize,
    pub reconstruction_samples: usize,
    /// Added to the x-lag coefficient in the mutation test.
    pub mutation: f64,
    pub kernel_window: usize,
    pub moment_triples: usize,
    pub convergence_scales: Vec<u32>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            weights: vec![(0.6, 0.9), (0.3, 0.5), (0.8, 0.4), (0.95, 0.7)],
            exact_window: 4,
            reconstruction_scale: 16,
            reconstruction_window: 32,
            reconstruction_samples: 100,
            mutation: 1e-6,
            kernel_window: 30,
            moment_triples: 20,
            convergence_scales: vec![16, 32, 64, 128, 256],
        }
    }
}

/// Acceptance thresholds. Statistical bands are engineering choices, not
/// derived rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub exact: f64,
    pub reconstruction: f64,
    pub kernel: f64,
    pub variance_ratio: (f64, f64),
    pub cross_se: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub height_ratio: (f64, f64),
    pub lln_final: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            exact: 1e-10,
            reconstruction: 1e-9,
            kernel: 1e-8,
            variance_ratio: (0.8, 1.2),
            cross_se: 3.0,
            skewness: 0.2,
            excess_kurtosis: 0.4,
            height_ratio: (0.8, 1.2),
            lln_final: 0.15,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.scale, self.beta1, self.beta2)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if !(self.extent > 0.0) || !(self.lln.extent > 0.0) {
            return Err(Error::Config("extents must be positive".into()));
        }
        if self.replicas < 2 || self.lln.replicas < 1 {
            return Err(Error::Config("need at least two replicas".into()));
        }
        for &(x, y) in &self.points {
            if !(x > 0.0 && y > 0.0 && x < self.extent && y < self.extent) {
                return Err(Error::Config(format!(
                    "point ({x}, {y}) outside (0, {})^2",
                    self.extent
                )));
            }
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::Config("grid_step must be positive".into()));
        }
        Ok(())
    }

    /// Lattice window side for scale `l` and macroscopic side `a`.
    pub fn window(l: u32, a: f64) -> usize {
        (a * l as f64).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_is_default() {
        assert_eq!(
            ExperimentConfig::from_json_str("{}").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn reads_model_keys() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"L": 64, "beta1": 1.5, "beta2": 0.5, "bc": {"kind": "empty"}, "extent": 1.0,
                "seed": 9, "points": [[0.5, 0.5], [0.9, 0.2]]}"#,
        )
        .unwrap();
        assert_eq!(cfg.scale, 64);
        assert_eq!(cfg.bc, BoundarySpec::Empty);
        assert_eq!(cfg.points.len(), 2);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_json_str(r#"{"beta1": 1.0, "beta2": 1.0}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"points": [[2.0, 0.5]]}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"replicas": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"unknown": 1}"#).is_err());
    }
}
