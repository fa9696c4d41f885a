//! Pipeline configuration: a strict TOML schema whose defaults reproduce
//! the reference dimensioning (100-sample channels, 53 coefficients,
//! 477/54 feature vectors, 8 + 2 PCA retention, 10-d classifier input).
//!
//! Unknown keys are rejected so a typo cannot silently fall back to a
//! default.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::features::{DEFAULT_STATS_K, DEFAULT_TRANSFORM_K};
use crate::svm::{KernelKind, SvmParams};
use crate::transforms::{PreprocessMode, CHANNEL_LEN};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("invalid config: {detail}")]
    Validation { detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Preprocessing transform: dwt, dct or dwt-dct.
    #[serde(default = "default_mode")]
    pub mode: PreprocessMode,
    /// Channel resample length. Fixed at 100: the 53-coefficient blocks
    /// and every downstream dimension derive from it.
    #[serde(default = "default_resample_length")]
    pub resample_length: usize,
    /// Analysis wavelet. Only db4 is implemented.
    #[serde(default = "default_wavelet")]
    pub wavelet: String,
    /// Wavelet decomposition depth. The feature layout requires 1.
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Moving-average window applied to the raw channels before
    /// differencing; 0 disables smoothing, otherwise must be odd.
    #[serde(default)]
    pub smooth_window: usize,
    #[serde(default)]
    pub pca: PcaConfig,
    #[serde(default)]
    pub svm: SvmConfig,
    #[serde(default)]
    pub split: SplitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaConfig {
    #[serde(default = "default_transform_k")]
    pub transform_k: usize,
    #[serde(default = "default_stats_k")]
    pub stats_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmConfig {
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
    #[serde(default = "default_c")]
    pub c: f64,
    /// RBF width; omitted means 1 / reduced dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_passes")]
    pub max_passes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default = "default_train_genuine")]
    pub train_genuine: usize,
    #[serde(default = "default_train_forgery")]
    pub train_forgery: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_mode() -> PreprocessMode {
    PreprocessMode::DwtDct
}
fn default_resample_length() -> usize {
    CHANNEL_LEN
}
fn default_wavelet() -> String {
    "db4".to_string()
}
fn default_levels() -> usize {
    1
}
fn default_transform_k() -> usize {
    DEFAULT_TRANSFORM_K
}
fn default_stats_k() -> usize {
    DEFAULT_STATS_K
}
fn default_kernel() -> KernelKind {
    KernelKind::Rbf
}
fn default_c() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-3
}
fn default_max_passes() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}
fn default_train_genuine() -> usize {
    10
}
fn default_train_forgery() -> usize {
    10
}

impl Default for PcaConfig {
    fn default() -> Self {
        Self {
            transform_k: default_transform_k(),
            stats_k: default_stats_k(),
        }
    }
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            kernel: default_kernel(),
            c: default_c(),
            gamma: None,
            tol: default_tol(),
            max_passes: default_max_passes(),
            seed: default_seed(),
        }
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_genuine: default_train_genuine(),
            train_forgery: default_train_forgery(),
            seed: default_seed(),
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            resample_length: default_resample_length(),
            wavelet: default_wavelet(),
            levels: default_levels(),
            smooth_window: 0,
            pca: PcaConfig::default(),
            svm: SvmConfig::default(),
            split: SplitConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads and validates a TOML config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: PipelineConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |detail: String| Err(ConfigError::Validation { detail });
        if self.resample_length != CHANNEL_LEN {
            return fail(format!(
                "resample_length must be {CHANNEL_LEN}; the 53-coefficient feature layout depends on it"
            ));
        }
        if self.wavelet != "db4" {
            return fail(format!("wavelet must be db4, got '{}'", self.wavelet));
        }
        if self.levels != 1 {
            return fail(format!(
                "levels must be 1 for the 53-coefficient feature layout, got {}",
                self.levels
            ));
        }
        if self.smooth_window != 0 && self.smooth_window.is_multiple_of(2) {
            return fail(format!(
                "smooth_window must be 0 (off) or odd, got {}",
                self.smooth_window
            ));
        }
        if self.pca.transform_k == 0 || self.pca.stats_k == 0 {
            return fail("pca retention counts must be at least 1".into());
        }
        let train_total = self.split.train_genuine + self.split.train_forgery;
        if train_total < 2 || self.pca.transform_k > train_total - 1 {
            return fail(format!(
                "pca.transform_k = {} exceeds the PCA limit of training samples - 1 = {} \
                 (split.train_genuine + split.train_forgery - 1)",
                self.pca.transform_k,
                train_total.saturating_sub(1)
            ));
        }
        if self.pca.stats_k > train_total - 1 {
            return fail(format!(
                "pca.stats_k = {} exceeds the PCA limit of training samples - 1 = {}",
                self.pca.stats_k,
                train_total - 1
            ));
        }
        if self.split.train_genuine == 0 || self.split.train_forgery == 0 {
            return fail("split.train_genuine and split.train_forgery must be at least 1".into());
        }
        if self.svm.c.is_nan() || self.svm.c <= 0.0 {
            return fail(format!("svm.c must be positive, got {}", self.svm.c));
        }
        if let Some(g) = self.svm.gamma {
            if g.is_nan() || g <= 0.0 {
                return fail(format!("svm.gamma must be positive, got {g}"));
            }
        }
        if self.svm.tol.is_nan() || self.svm.tol <= 0.0 {
            return fail(format!("svm.tol must be positive, got {}", self.svm.tol));
        }
        if self.svm.max_passes == 0 {
            return fail("svm.max_passes must be at least 1".into());
        }
        Ok(())
    }

    /// Resolved SVM hyperparameters for the reduced feature dimension.
    pub fn svm_params(&self) -> SvmParams {
        SvmParams {
            kernel: self.svm.kernel,
            c: self.svm.c,
            gamma: self.svm.gamma,
            tol: self.svm.tol,
            max_passes: self.svm.max_passes,
            seed: self.svm.seed,
        }
    }

    /// Reduced feature dimension (`transform_k + stats_k`).
    pub fn reduced_len(&self) -> usize {
        self.pca.transform_k + self.pca.stats_k
    }

    /// Smoothing window as an option (`None` when off).
    pub fn smoothing(&self) -> Option<usize> {
        if self.smooth_window == 0 {
            None
        } else {
            Some(self.smooth_window)
        }
    }

    /// Canonical TOML rendering, used as the config snapshot in reports
    /// and model files.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
