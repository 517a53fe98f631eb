//! TOML run configuration: top-level keys plus one table per component and
//! an array of `[[settings]]` tables.
//!
//! ```toml
//! objective = "total"
//! corpus_size = 100
//! jobs = 1
//! model = "model.bin"
//!
//! [scenario]
//! request_count = 20
//! seed = 1
//!
//! [evo]
//! archive_capacity = 20
//!
//! [[settings]]
//! name = "evo-5000"
//! solver = "evo"
//! budget = 5000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{comparison_settings, validate_settings, BenchSetting, SolverKind};
use crate::error::{Error, Result};
use crate::evo::EvoParams;
use crate::ga::GaParams;
use crate::problem::ObjectiveKind;
use crate::scengen::GenConfig;
use crate::surrogate::TrainConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub objective: ObjectiveKind,
    /// Scenarios generated for `bench` and for surrogate training.
    pub corpus_size: usize,
    /// Worker threads for `bench`; 0 uses every core.
    pub jobs: usize,
    /// Trained surrogate used by `surrogate` settings; relative paths are
    /// taken from the config file's directory.
    pub model: Option<PathBuf>,
    /// Evaluation budget of the evo runs that label the training corpus.
    pub label_budget: u64,
    pub scenario: GenConfig,
    pub ga: GaParams,
    pub evo: EvoParams,
    pub train: TrainConfig,
    pub settings: Vec<BenchSetting>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Total,
            corpus_size: 100,
            jobs: 0,
            model: None,
            label_budget: 50000,
            scenario: GenConfig::default(),
            ga: GaParams::default(),
            evo: EvoParams::default(),
            train: TrainConfig::default(),
            settings: comparison_settings()
                .into_iter()
                .filter(|s| s.solver != SolverKind::Surrogate)
                .collect(),
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if let (Some(model), Some(dir)) = (&cfg.model, path.parent()) {
            if model.is_relative() {
                cfg.model = Some(dir.join(model));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpus_size == 0 {
            return Err(Error::Config("corpus_size must be positive".into()));
        }
        self.scenario.validate()?;
        self.ga.validate()?;
        self.evo.validate()?;
        self.train.validate()?;
        validate_settings(&self.settings)
    }
}
