//! Ensembles with an adaptive stopping rule, parameter grids and
//! single-dictionary trace experiments.
//!
//! Replicate `i` of an ensemble uses a dictionary seeded from
//! `(master seed, generator fingerprint, i)`. The discovery strategy only
//! salts the order seed, so frequency and random ensembles of one cell run
//! on the same dictionaries. Replicates are computed in parallel and reduced
//! in index order, so thread count never changes an output bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discovery::{make_order, run_world, DiscoveryTrace, Strategy};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorParams, Model, World};
use crate::measures::{
    aggregate, averaged_rank_trajectories, frequency_change_series, FrequencyChange,
    InnovationAggregates, MeasureConventions, RankVector,
};
use crate::model::{Dictionary, OccurrenceMode};
use crate::seeds::{self, derive_seed};

/// What the stopping rule divides by `|mean|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RsdMode {
    /// Standard error of the mean.
    #[default]
    Sem,
    /// Sample standard deviation.
    Sd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub min_count: usize,
    pub rsd_target: f64,
    pub max_count: usize,
    /// Replicates added between stopping-rule checks.
    pub batch: usize,
    pub rsd_mode: RsdMode,
    /// Also require the unused-symbol count to meet the target.
    pub track_unused: bool,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings {
            min_count: 16,
            rsd_target: 0.05,
            max_count: 1024,
            batch: 8,
            rsd_mode: RsdMode::Sem,
            track_unused: false,
        }
    }
}

impl EnsembleSettings {
    pub fn validate(&self) -> Result<()> {
        if self.min_count == 0 {
            return Err(Error::InvalidParams("min_count must be at least 1".into()));
        }
        if self.min_count > self.max_count {
            return Err(Error::InvalidParams(format!(
                "min_count ({}) exceeds max_count ({})",
                self.min_count, self.max_count
            )));
        }
        if self.rsd_target.is_nan() || self.rsd_target <= 0.0 {
            return Err(Error::InvalidParams("rsd_target must be positive".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidParams("batch must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// The seed is the ensemble's master seed.
    pub generator: GeneratorParams,
    pub strategy: Strategy,
    pub settings: EnsembleSettings,
    pub conventions: MeasureConventions,
}

impl EnsembleConfig {
    pub fn new(generator: GeneratorParams, strategy: Strategy) -> Self {
        EnsembleConfig {
            generator,
            strategy,
            settings: EnsembleSettings::default(),
            conventions: MeasureConventions::default(),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&json))
    }

    pub fn replicate_seed(&self, index: usize) -> u64 {
        derive_seed(
            self.generator.seed,
            &[self.generator.fingerprint(), index as u64],
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureStats {
    pub mean: f64,
    /// Sample standard deviation (zero for a single sample).
    pub sd: f64,
    pub sem: f64,
    pub count: usize,
}

impl MeasureStats {
    pub fn from_samples(samples: impl ExactSizeIterator<Item = f64> + Clone) -> Self {
        let count = samples.len();
        if count == 0 {
            return MeasureStats::default();
        }
        let n = count as f64;
        let mean = samples.clone().sum::<f64>() / n;
        let sd = if count > 1 {
            (samples.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeasureStats {
            mean,
            sd,
            sem: sd / n.sqrt(),
            count,
        }
    }

    /// Relative spread under `mode`; `None` when the mean is zero.
    pub fn relative(&self, mode: RsdMode) -> Option<f64> {
        if self.mean == 0.0 {
            return None;
        }
        let spread = match mode {
            RsdMode::Sem => self.sem,
            RsdMode::Sd => self.sd,
        };
        Some(spread / self.mean.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    RsdMet,
    MaxCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub delta_r: MeasureStats,
    pub delta_omega: MeasureStats,
    pub delta_chi: MeasureStats,
    pub unused: MeasureStats,
    pub count: usize,
    pub stopped_by: StopReason,
}

impl EnsembleStats {
    fn from_samples(samples: &[InnovationAggregates], stopped_by: StopReason) -> Self {
        EnsembleStats {
            delta_r: MeasureStats::from_samples(samples.iter().map(|a| a.delta_r)),
            delta_omega: MeasureStats::from_samples(samples.iter().map(|a| a.delta_omega)),
            delta_chi: MeasureStats::from_samples(samples.iter().map(|a| a.delta_chi)),
            unused: MeasureStats::from_samples(samples.iter().map(|a| a.unused_symbols as f64)),
            count: samples.len(),
            stopped_by,
        }
    }

    fn tracked(&self, settings: &EnsembleSettings) -> Vec<&MeasureStats> {
        let mut v = vec![&self.delta_r, &self.delta_omega, &self.delta_chi];
        if settings.track_unused {
            v.push(&self.unused);
        }
        v
    }

    /// Whether every tracked measure with a non-zero mean meets the target.
    pub fn meets_target(&self, settings: &EnsembleSettings) -> bool {
        self.tracked(settings).iter().all(|m| {
            m.relative(settings.rsd_mode)
                .is_none_or(|r| r <= settings.rsd_target)
        })
    }
}

/// Generate, discover and aggregate one replicate.
pub fn run_replicate(config: &EnsembleConfig, index: usize) -> Result<InnovationAggregates> {
    let seed = config.replicate_seed(index);
    let params = GeneratorParams {
        seed,
        ..config.generator.clone()
    };
    let world = generate(&params)?;
    let order_seed = derive_seed(seed, &[seeds::stream::ORDER, config.strategy.code()]);
    let order = make_order(&world, config.strategy, order_seed);
    let trace = run_world(&world, &order, OccurrenceMode::Membership)?;
    Ok(aggregate(&trace, &world, &config.conventions))
}

fn run_range(config: &EnsembleConfig, from: usize, to: usize) -> Result<Vec<InnovationAggregates>> {
    (from..to)
        .into_par_iter()
        .map(|i| run_replicate(config, i))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Grow the ensemble until the stopping rule is met or `max_count` is reached.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleStats> {
    config.generator.validate()?;
    config.settings.validate()?;
    let settings = &config.settings;
    let mut samples = run_range(config, 0, settings.min_count)?;
    loop {
        let stats = EnsembleStats::from_samples(&samples, StopReason::RsdMet);
        if stats.meets_target(settings) {
            return Ok(stats);
        }
        if samples.len() >= settings.max_count {
            return Ok(EnsembleStats {
                stopped_by: StopReason::MaxCount,
                ..stats
            });
        }
        let next = (samples.len() + settings.batch).min(settings.max_count);
        samples.extend(run_range(config, samples.len(), next)?);
    }
}

/// Generator parameter that a grid axis varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridParam {
    Symbols,
    Words,
    WordLength,
    ForkProbability,
}

impl GridParam {
    pub fn tag(&self) -> &'static str {
        match self {
            GridParam::Symbols => "symbols",
            GridParam::Words => "words",
            GridParam::WordLength => "word_length",
            GridParam::ForkProbability => "fork_probability",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: GridParam,
    pub values: Vec<f64>,
}

fn as_count(param: GridParam, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(Error::InvalidParams(format!(
            "{} axis value {value} must be a positive integer",
            param.tag()
        )));
    }
    Ok(value as usize)
}

/// Set one parameter on a copy of `params`.
pub fn apply_axis(
    params: &GeneratorParams,
    param: GridParam,
    value: f64,
) -> Result<GeneratorParams> {
    let mut p = params.clone();
    match param {
        GridParam::Symbols => p.symbols = as_count(param, value)?,
        GridParam::Words => p.words = as_count(param, value)?,
        GridParam::WordLength => match &mut p.model {
            Model::Fixed { word_length } => *word_length = as_count(param, value)?,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "word_length axis needs the fixed model, not {}",
                    p.model.tag()
                )))
            }
        },
        GridParam::ForkProbability => match &mut p.model {
            Model::Chain { fork_probability } | Model::Blinkered { fork_probability } => {
                *fork_probability = value
            }
            _ => {
                return Err(Error::InvalidParams(format!(
                    "fork_probability axis needs the chain or blinkered model, not {}",
                    p.model.tag()
                )))
            }
        },
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Fixed parameters; the seed is the grid's master seed.
    pub base: GeneratorParams,
    pub axis1: Axis,
    pub axis2: Axis,
    pub strategies: Vec<Strategy>,
    pub settings: EnsembleSettings,
    pub conventions: MeasureConventions,
}

/// Sizes used for the `S` and `D` axes of the default grids.
pub const DEFAULT_SYMBOLS: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];
pub const DEFAULT_WORDS: [f64; 6] = [45.0, 91.0, 181.0, 362.0, 724.0, 1024.0];

impl GridSpec {
    /// `S × D` grid with the model's own parameter held at its default
    /// (`L = 8`, `f = 0.1`).
    pub fn size_grid(model: Model, seed: u64) -> Self {
        let model = match model {
            Model::Fixed { .. } => Model::Fixed { word_length: 8 },
            Model::Chain { .. } => Model::Chain {
                fork_probability: 0.1,
            },
            Model::Blinkered { .. } => Model::Blinkered {
                fork_probability: 0.1,
            },
            m => m,
        };
        GridSpec {
            base: GeneratorParams::new(model, 32, 1024, seed),
            axis1: Axis {
                param: GridParam::Symbols,
                values: DEFAULT_SYMBOLS.to_vec(),
            },
            axis2: Axis {
                param: GridParam::Words,
                values: DEFAULT_WORDS.to_vec(),
            },
            strategies: vec![Strategy::Frequency, Strategy::Random],
            settings: EnsembleSettings::default(),
            conventions: MeasureConventions::default(),
        }
    }

    /// `S × L` (fixed) or `S × f` (chain, blinkered) grid at `D = 1024`.
    pub fn parameter_grid(model: Model, seed: u64) -> Result<Self> {
        let axis2 = match model {
            Model::Fixed { .. } => Axis {
                param: GridParam::WordLength,
                values: (2..=11).map(f64::from).collect(),
            },
            Model::Chain { .. } | Model::Blinkered { .. } => Axis {
                param: GridParam::ForkProbability,
                values: (1..=10).map(|k| f64::from(k) / 11.0).collect(),
            },
            m => {
                return Err(Error::InvalidParams(format!(
                    "the {} model has no generator-specific parameter",
                    m.tag()
                )))
            }
        };
        Ok(GridSpec {
            axis2,
            ..GridSpec::size_grid(model, seed)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis1.param == self.axis2.param {
            return Err(Error::InvalidParams("grid axes must differ".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::InvalidParams(
                "grid needs at least one strategy".into(),
            ));
        }
        self.settings.validate()?;
        for axis in [&self.axis1, &self.axis2] {
            if axis.values.is_empty() {
                return Err(Error::InvalidParams(format!(
                    "{} axis is empty",
                    axis.param.tag()
                )));
            }
            for &v in &axis.values {
                if v.is_nan() || v <= 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "{} axis value {v} must be positive",
                        axis.param.tag()
                    )));
                }
                apply_axis(&self.base, axis.param, v)?;
            }
        }
        Ok(())
    }

    /// Ensemble configuration of one cell.
    pub fn cell_config(&self, v1: f64, v2: f64, strategy: Strategy) -> Result<EnsembleConfig> {
        let p = apply_axis(&self.base, self.axis1.param, v1)?;
        let p = apply_axis(&p, self.axis2.param, v2)?;
        Ok(EnsembleConfig {
            generator: p,
            strategy,
            settings: self.settings.clone(),
            conventions: self.conventions,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub axis1: f64,
    pub axis2: f64,
    pub strategy: Strategy,
    pub config: Option<EnsembleConfig>,
    pub outcome: std::result::Result<EnsembleStats, String>,
}

/// Evaluate the full cartesian product; rows are ordered by axis1, axis2,
/// then strategy in declaration order. Cell failures are kept in the row.
pub fn run_grid(grid: &GridSpec) -> Result<Vec<GridRow>> {
    grid.validate()?;
    let mut cells = Vec::new();
    for &v1 in &grid.axis1.values {
        for &v2 in &grid.axis2.values {
            for &strategy in &grid.strategies {
                cells.push((v1, v2, strategy));
            }
        }
    }
    Ok(cells
        .into_par_iter()
        .map(|(v1, v2, strategy)| {
            let config = grid.cell_config(v1, v2, strategy);
            let outcome = config
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|c| run_ensemble(c).map_err(|e| e.to_string()));
            GridRow {
                axis1: v1,
                axis2: v2,
                strategy,
                config: config.ok(),
                outcome,
            }
        })
        .collect())
}

/// Plot-ready per-step series derived from one trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    pub frequency_changes: Vec<FrequencyChange>,
    pub entropy: Vec<Option<f64>>,
    pub fraction_discovered: Vec<f64>,
    pub averaged_ranks: Vec<RankVector>,
}

impl TraceSeries {
    pub fn from_trace(trace: &DiscoveryTrace) -> Self {
        TraceSeries {
            frequency_changes: frequency_change_series(trace),
            entropy: trace.snapshots.iter().map(|s| s.entropy).collect(),
            fraction_discovered: trace
                .snapshots
                .iter()
                .map(|s| s.fraction_discovered)
                .collect(),
            averaged_ranks: averaged_rank_trajectories(trace),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRun {
    pub strategy: Strategy,
    /// Index among the orders run for this strategy.
    pub order_index: usize,
    pub trace: DiscoveryTrace,
    pub series: TraceSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceBundle {
    pub dictionary: Dictionary,
    pub runs: Vec<TraceRun>,
}

/// Generate one dictionary and replay every requested strategy on it.
/// Randomised strategies are run `n_random_orders` times each.
pub fn run_trace_experiment(
    generator: &GeneratorParams,
    strategies: &[Strategy],
    n_random_orders: usize,
    mode: OccurrenceMode,
) -> Result<TraceBundle> {
    if generator.model == Model::Null {
        return Err(Error::Unsupported(
            "trace experiments need a real dictionary, not the null model".into(),
        ));
    }
    let world = generate(generator)?;
    let World::Real(dictionary) = &world else {
        unreachable!("non-null model yields a real dictionary");
    };
    let mut jobs = Vec::new();
    for &strategy in strategies {
        let repeats = if strategy.is_randomised() {
            n_random_orders
        } else {
            1
        };
        for k in 0..repeats {
            jobs.push((strategy, k));
        }
    }
    let runs = jobs
        .into_par_iter()
        .map(|(strategy, k)| {
            let seed = derive_seed(
                generator.seed,
                &[seeds::stream::ORDER, strategy.code(), k as u64],
            );
            let order = make_order(&world, strategy, seed);
            let trace = run_world(&world, &order, mode)?;
            Ok(TraceRun {
                strategy,
                order_index: k,
                series: TraceSeries::from_trace(&trace),
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceBundle {
        dictionary: dictionary.clone(),
        runs,
    })
}
