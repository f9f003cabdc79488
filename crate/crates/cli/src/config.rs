//! Run configuration documents.

use std::fs;
use std::path::{Path, PathBuf};

use hamcode::dynamics::NoiseSpec;
use hamcode::models::{encode, EncodedSystem, ModelSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inline model document or a path to one.
    #[serde(default)]
    pub model: Option<serde_json::Value>,
    /// Previously encoded system (output of `encode`).
    #[serde(default)]
    pub system: Option<PathBuf>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub record_wall_time: bool,
    /// Also evaluate the unencoded target under noise.
    #[serde(default)]
    pub baseline: bool,
    #[serde(default)]
    pub dense_limit: Option<usize>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_lambdas() -> Vec<f64> {
    (5..=14).map(|k| 2f64.powi(k)).collect()
}

fn default_t() -> f64 {
    1.0
}

fn default_samples() -> usize {
    20
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.model.is_some() == self.system.is_some() {
            return Err(CliError::Config("config needs exactly one of \"model\" or \"system\"".into()));
        }
        if self.lambdas.is_empty() {
            return Err(CliError::Config("\"lambdas\" is empty".into()));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(CliError::Config(format!("\"lambdas\": values must be positive, got {l}")));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(CliError::Config(format!("\"t\": must be non-negative, got {}", self.t)));
        }
        if self.samples == 0 {
            return Err(CliError::Config("\"samples\": must be positive".into()));
        }
        self.noise.validate().map_err(|e| CliError::Config(format!("\"noise\": {e}")))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn model_spec(&self) -> Result<Option<ModelSpec>, CliError> {
        match &self.model {
            None => Ok(None),
            Some(serde_json::Value::String(p)) => {
                let path = self.resolve(Path::new(p));
                ModelSpec::from_json(&read(&path)?)
                    .map(Some)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Config(format!("\"model\": {e}"))),
        }
    }

    /// Encodes the configured model or loads the stored system.
    pub fn system(&self) -> Result<EncodedSystem, CliError> {
        if let Some(spec) = self.model_spec()? {
            return Ok(encode(&spec)?);
        }
        let path = self.resolve(self.system.as_deref().expect("validated"));
        EncodedSystem::from_json(&read(&path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}
