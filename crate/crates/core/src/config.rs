//! Flat TOML run configuration. Every run writes the exact config it used
//! next to its outputs; re-running from that file reproduces the results.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dsbm::{DsbmConfig, SignFlipMode};
use crate::error::Error;
use crate::nn::AdamConfig;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowPolicy {
    /// Per task: every task except link sign.
    #[default]
    Auto,
    On,
    Off,
}

impl std::str::FromStr for FlowPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            other => Err(Error::InvalidConfig(format!(
                "unknown flow policy `{other}` (expected auto, on or off)"
            ))),
        }
    }
}

/// Column-wise rescaling of the degree features before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureScaling {
    None,
    /// Divide by the column's root mean square; signs are kept.
    #[default]
    Scale,
    /// Zero mean, unit variance.
    Standardize,
}

impl std::str::FromStr for FeatureScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "scale" => Ok(Self::Scale),
            "standardize" => Ok(Self::Standardize),
            other => Err(Error::InvalidConfig(format!(
                "unknown feature scaling `{other}` (expected none, scale or standardize)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: String,
    pub operator: String,
    pub q: f64,
    pub seed: u64,
    /// Number of folds; the task's own default when absent.
    pub folds: Option<usize>,
    pub max_epochs: usize,
    pub patience: usize,
    pub filters1: usize,
    pub filters2: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub flow_preprocess: FlowPolicy,
    pub feature_scaling: FeatureScaling,
    /// Edge list to load; a DSBM graph is generated when absent.
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub merge_parallel: bool,
    pub dsbm_n: usize,
    pub dsbm_clusters: usize,
    pub dsbm_alpha_intra: f64,
    pub dsbm_alpha_inter: f64,
    pub dsbm_beta: f64,
    pub dsbm_weight_lo: u32,
    pub dsbm_weight_hi: u32,
    pub dsbm_seed: u64,
    pub sign_flip_frac: f64,
    pub sign_flip_mode: SignFlipMode,
    pub sign_flip_seed: u64,
    /// Permute node labels before splitting (negative control).
    pub shuffle_labels: bool,
    pub parallel_folds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            task: "node".into(),
            operator: "sigma".into(),
            q: 0.25,
            seed: 0,
            folds: None,
            max_epochs: 3000,
            patience: 500,
            filters1: 16,
            filters2: 16,
            learning_rate: 1e-3,
            weight_decay: 5e-4,
            dropout: 0.5,
            flow_preprocess: FlowPolicy::Auto,
            feature_scaling: FeatureScaling::Scale,
            edges: None,
            labels: None,
            merge_parallel: false,
            dsbm_n: 500,
            dsbm_clusters: 5,
            dsbm_alpha_intra: 0.1,
            dsbm_alpha_inter: 0.1,
            dsbm_beta: 0.2,
            dsbm_weight_lo: 2,
            dsbm_weight_hi: 1000,
            dsbm_seed: 0,
            sign_flip_frac: 0.0,
            sign_flip_mode: SignFlipMode::TargetNode,
            sign_flip_seed: 0,
            shuffle_labels: false,
            parallel_folds: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.folds == Some(0) {
            return bad("folds must be at least 1".into());
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if self.filters1 == 0 || self.filters2 == 0 {
            return bad("filter counts must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            ));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad(format!(
                "weight_decay {} must be non-negative",
                self.weight_decay
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} must lie in [0, 1)", self.dropout));
        }
        if !(0.0..=1.0).contains(&self.sign_flip_frac) {
            return bad(format!(
                "sign_flip_frac {} must lie in [0, 1]",
                self.sign_flip_frac
            ));
        }
        if self.parallel_folds == 0 {
            return bad("parallel_folds must be at least 1".into());
        }
        if self.labels.is_some() && self.edges.is_none() {
            return bad("labels given without an edge list".into());
        }
        if self.edges.is_none() {
            self.dsbm().validate()?;
        }
        Ok(())
    }

    pub fn dsbm(&self) -> DsbmConfig {
        DsbmConfig::uniform(
            self.dsbm_n,
            self.dsbm_clusters,
            self.dsbm_alpha_intra,
            self.dsbm_alpha_inter,
            self.dsbm_beta,
            self.dsbm_weight_lo,
            self.dsbm_weight_hi,
            self.dsbm_seed,
        )
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            ..AdamConfig::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        // relative data paths are relative to the config file
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.edges, &mut cfg.labels].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Writes the config with absolute data paths.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut cfg = self.clone();
        for p in [&mut cfg.edges, &mut cfg.labels].into_iter().flatten() {
            if let Ok(abs) = std::path::absolute(&*p) {
                *p = abs;
            }
        }
        std::fs::write(path, cfg.to_toml()?).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg =
            RunConfig::from_toml("task = \"link-sign\"\nfolds = 5\nsign_flip_mode = \"edge\"\n")
                .unwrap();
        assert_eq!(cfg.task, "link-sign");
        assert_eq!(cfg.folds, Some(5));
        assert_eq!(cfg.sign_flip_mode, SignFlipMode::Edge);
        assert_eq!(cfg.max_epochs, 3000);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(RunConfig::from_toml("epochs = 3").is_err());
        let cfg = RunConfig {
            dropout: 1.0,
            ..RunConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = RunConfig {
            dsbm_n: 501,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        let cfg = RunConfig {
            seed: 42,
            learning_rate: 0.1 + 0.2,
            ..RunConfig::default()
        };
        cfg.save(&path).unwrap();
        assert_eq!(RunConfig::load(&path).unwrap(), cfg);
    }
}
