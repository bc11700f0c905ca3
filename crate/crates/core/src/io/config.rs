//! TOML run configurations.
//!
//! Every config carries `schema_version = 1` and a `[generator]` table with
//! a mandatory `seed`. Example trace config:
//!
//! ```toml
//! schema_version = 1
//! strategies = ["frequency", "random"]
//! n_random_orders = 2
//!
//! [generator]
//! model = "chain"
//! symbols = 32
//! words = 1024
//! fork_probability = 0.1
//! seed = 99
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::discovery::Strategy;
use crate::error::{Error, Result};
use crate::experiments::{Axis, EnsembleSettings, GridSpec};
use crate::generators::GeneratorParams;
use crate::measures::MeasureConventions;
use crate::model::OccurrenceMode;

pub const SCHEMA_VERSION: u32 = 1;

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::Frequency, Strategy::Random]
}

fn default_random_orders() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub schema_version: u32,
    pub generator: GeneratorParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub schema_version: u32,
    pub generator: GeneratorParams,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_random_orders")]
    pub n_random_orders: usize,
    #[serde(default)]
    pub occurrence: OccurrenceMode,
}

/// Which default axes to use when none are given.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPreset {
    /// `S × D`.
    #[default]
    Size,
    /// `S × L` or `S × f` at `D = 1024`.
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub schema_version: u32,
    /// Fixed parameters; `seed` is the master seed.
    pub generator: GeneratorParams,
    #[serde(default)]
    pub grid: GridPreset,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub ensemble: EnsembleSettings,
    #[serde(default)]
    pub measures: MeasureConventions,
}

impl ScaleConfig {
    pub fn grid_spec(&self) -> Result<GridSpec> {
        let preset = match self.grid {
            GridPreset::Size => GridSpec::size_grid(self.generator.model, self.generator.seed),
            GridPreset::Parameter => {
                GridSpec::parameter_grid(self.generator.model, self.generator.seed)?
            }
        };
        let spec = GridSpec {
            base: self.generator.clone(),
            axis1: self.axis1.clone().unwrap_or(preset.axis1),
            axis2: self.axis2.clone().unwrap_or(preset.axis2),
            strategies: self.strategies.clone(),
            settings: self.ensemble.clone(),
            conventions: self.measures,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Configs that expose their generator for validation and seed overrides.
pub trait RunConfig: DeserializeOwned + Serialize {
    fn schema_version(&self) -> u32;
    fn generator_mut(&mut self) -> &mut GeneratorParams;
}

macro_rules! run_config {
    ($t:ty) => {
        impl RunConfig for $t {
            fn schema_version(&self) -> u32 {
                self.schema_version
            }
            fn generator_mut(&mut self) -> &mut GeneratorParams {
                &mut self.generator
            }
        }
    };
}

run_config!(GenerateConfig);
run_config!(TraceConfig);
run_config!(ScaleConfig);

pub fn parse_config<T: RunConfig>(text: &str) -> Result<T> {
    let cfg: T = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    if cfg.schema_version() != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            cfg.schema_version()
        )));
    }
    Ok(cfg)
}

/// Read, parse and optionally override the seed.
pub fn load_config<T: RunConfig>(path: &Path, seed_override: Option<u64>) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: T = parse_config(&text)?;
    if let Some(seed) = seed_override {
        cfg.generator_mut().seed = seed;
    }
    Ok(cfg)
}
