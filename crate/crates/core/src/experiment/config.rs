use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::synth::SynthConfig;
use super::ExperimentError;
use crate::data::{CsvSchema, RemovalMode};
use crate::linear::{Hyper, LossKind};
use crate::oversample::{OversampleConfig, Preprocessor};
use crate::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DataSource {
    /// A CSV file; relative paths are resolved against the config file.
    Csv { path: PathBuf, schema: CsvSchema },
    /// The built-in biased Gaussian generator.
    Synthetic(SynthConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub kind: LossKind,
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let h = Hyper::default();
        Self { kind: LossKind::Logistic, learning_rate: h.learning_rate, l2: h.l2, epochs: h.epochs }
    }
}

impl ClassifierConfig {
    pub fn hyper(&self, seed: u64) -> Hyper {
        Hyper { learning_rate: self.learning_rate, l2: self.l2, epochs: self.epochs, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    pub protected_in_distance: bool,
    pub interpolate_protected: bool,
    pub drop_protected_feature: bool,
    pub sweep_removal: RemovalMode,
}

/// Declarative description of one experiment run or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DataSource,
    #[serde(default = "default_preprocessor")]
    pub preprocessor: Preprocessor,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default = "default_five")]
    pub cv_k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_levels: Option<Vec<f64>>,
    #[serde(default = "default_five")]
    pub knn_k: usize,
    #[serde(default)]
    pub flags: Flags,
    /// Record wall-clock time per stage. Off by default so reports stay
    /// byte-identical across runs.
    #[serde(default)]
    pub record_timings: bool,
}

fn default_preprocessor() -> Preprocessor {
    Preprocessor::None
}

fn default_five() -> usize {
    5
}

impl ExperimentConfig {
    pub fn new(dataset: DataSource, preprocessor: Preprocessor) -> Self {
        Self {
            dataset,
            preprocessor,
            classifier: ClassifierConfig::default(),
            cv_k: 5,
            seed: 0,
            sweep_levels: None,
            knn_k: 5,
            flags: Flags::default(),
            record_timings: false,
        }
    }

    /// Parse a `.json` or TOML file. Relative CSV paths are made relative to
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ExperimentConfig = parse_config_text(path, &text)?;
        if let DataSource::Csv { path: data_path, .. } = &mut cfg.dataset {
            if data_path.is_relative() {
                if let Some(dir) = path.parent() {
                    *data_path = dir.join(&*data_path);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.cv_k < 2 {
            return Err(ExperimentError::Config(format!("cv_k must be >= 2, got {}", self.cv_k)));
        }
        if self.knn_k == 0 {
            return Err(ExperimentError::Config("knn_k must be >= 1".into()));
        }
        if let Some(levels) = &self.sweep_levels {
            if levels.is_empty() {
                return Err(ExperimentError::Config("sweep_levels is empty".into()));
            }
            if levels.iter().any(|l| !(l.is_finite() && *l >= 1.0)) {
                return Err(ExperimentError::Config("sweep levels must be finite and >= 1".into()));
            }
            if levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ExperimentError::Config("sweep levels must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn oversample_config(&self, execution: Execution) -> OversampleConfig {
        OversampleConfig {
            k: self.knn_k,
            include_protected_in_distance: self.flags.protected_in_distance,
            interpolate_protected: self.flags.interpolate_protected,
            execution,
        }
    }
}

/// Deserialize JSON when the path ends in `.json`, TOML otherwise.
pub fn parse_config_text<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, ExperimentError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }
}
