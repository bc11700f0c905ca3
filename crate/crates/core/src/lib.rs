//! Synthetic innovation spaces.
//!
//! A world dictionary is a list of words built from `S` symbols by one of
//! five randomised generators. Symbols are discovered one at a time; each
//! discovery can make new words knowable and reshuffle how useful the known
//! symbols are. This crate generates the dictionaries, runs the discovery
//! processes, and measures rank churn, symbol entropy and word growth, both
//! for single traces and for ensembles over parameter grids.
//!
//! ```
//! use innodict_core::{generate_dictionary, order_frequency, run_discovery, GeneratorParams, Model};
//!
//! let params = GeneratorParams::new(Model::Extensible, 32, 1024, 7);
//! let dict = generate_dictionary(&params).unwrap();
//! let trace = run_discovery(&dict, &order_frequency(&dict, 1)).unwrap();
//! assert!(trace.snapshots[0].knowable_count >= 1);
//! ```

pub mod calibration;
pub mod discovery;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod io;
pub mod measures;
pub mod model;
pub mod seeds;

pub use discovery::{
    make_order, order_frequency, order_frequency_weighted, order_random, order_reverse_frequency,
    run_discovery, run_discovery_with, run_null_discovery, run_world, DiscoveryOrder,
    DiscoveryTrace, StepSnapshot, Strategy,
};
pub use error::{Error, Result};
pub use experiments::{
    run_ensemble, run_grid, run_trace_experiment, EnsembleConfig, EnsembleSettings, EnsembleStats,
    GridSpec, MeasureStats, RsdMode, StopReason,
};
pub use generators::{
    generate, generate_dictionary, generate_with_log, interrogate_null, GeneratorParams, Model,
    NullDictionary, World,
};
pub use measures::{
    aggregate, averaged_rank_trajectories, delta_chi, delta_omega, delta_r,
    frequency_change_series, rank_with_tie_averaging, symbol_entropy, ChangeCount, Divisor,
    InnovationAggregates, MeasureConventions, Normalization, RankVector,
};
pub use model::{
    knowable_words, occurrence_distribution, unused_symbol_count, usefulness, Dictionary,
    KnowledgeState, OccurrenceMode, Provenance, SymbolId, UsefulnessTable, Word,
};
