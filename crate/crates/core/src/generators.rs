//! The five dictionary generators.
//!
//! * **Null**: no word list; interrogation returns `W = round(N·D/S)` and a
//!   freshly shuffled usefulness ordering every time.
//! * **Fixed**: `D` words of exactly `L` i.i.d. uniform symbols, duplicates kept.
//! * **Extensible**: starts from `[α∘]`; every new word restarts from `[α∘]`
//!   and appends uniform symbols until the string is novel.
//! * **Chain**: with probability `1−f` extend a random existing word by one
//!   symbol, otherwise propose a random single-symbol word; duplicates rejected.
//! * **Blinkered**: as chain, but the extension appends a second random
//!   existing word instead of a single symbol.
//!
//! Every generator is a pure function of its [`GeneratorParams`].

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dictionary, Provenance, SymbolId, Word};
use crate::seeds::{self, SimRng};

/// Appends allowed while building one extensible word.
pub const EXTENSIBLE_APPEND_CAP: usize = 10_000;
/// Proposals allowed while building one chain or blinkered dictionary.
pub const PROPOSAL_CAP: usize = 1_000_000;

/// Generator model together with its model-specific parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    Null,
    Fixed { word_length: usize },
    Extensible,
    Chain { fork_probability: f64 },
    Blinkered { fork_probability: f64 },
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::Null => "null",
            Model::Fixed { .. } => "fixed",
            Model::Extensible => "extensible",
            Model::Chain { .. } => "chain",
            Model::Blinkered { .. } => "blinkered",
        }
    }

    pub fn word_length(&self) -> Option<usize> {
        match *self {
            Model::Fixed { word_length } => Some(word_length),
            _ => None,
        }
    }

    pub fn fork_probability(&self) -> Option<f64> {
        match *self {
            Model::Chain { fork_probability } | Model::Blinkered { fork_probability } => {
                Some(fork_probability)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    #[serde(flatten)]
    pub model: Model,
    /// `S`.
    pub symbols: usize,
    /// `D`.
    pub words: usize,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(model: Model, symbols: usize, words: usize, seed: u64) -> Self {
        GeneratorParams {
            model,
            symbols,
            words,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbols == 0 {
            return Err(Error::InvalidParams("symbols must be at least 1".into()));
        }
        if self.symbols > u32::MAX as usize {
            return Err(Error::InvalidParams("symbols must fit in 32 bits".into()));
        }
        if self.words == 0 {
            return Err(Error::InvalidParams("words must be at least 1".into()));
        }
        match self.model {
            Model::Fixed { word_length: 0 } => Err(Error::InvalidParams(
                "word_length must be at least 1".into(),
            )),
            Model::Chain { fork_probability } | Model::Blinkered { fork_probability } => {
                if !(fork_probability > 0.0 && fork_probability <= 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "fork_probability must lie in (0, 1], got {fork_probability}"
                    )));
                }
                if fork_probability == 1.0 && self.words > self.symbols {
                    return Err(Error::Unsatisfiable(format!(
                        "fork_probability = 1 only yields single-symbol words, so words ({}) cannot exceed symbols ({})",
                        self.words, self.symbols
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Non-fatal problems, e.g. a fixed dictionary that is not much smaller
    /// than the number of possible words.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Model::Fixed { word_length } = self.model {
            let possible = (self.symbols as f64).powi(word_length.min(i32::MAX as usize) as i32);
            if self.words as f64 >= possible {
                out.push(format!(
                    "fixed dictionary with {} words is not smaller than the {} possible words",
                    self.words, possible
                ));
            }
        }
        out
    }

    /// Stable 64-bit fingerprint of everything except the seed.
    pub fn fingerprint(&self) -> u64 {
        let (tag, extra) = match self.model {
            Model::Null => (1u64, 0u64),
            Model::Fixed { word_length } => (2, word_length as u64),
            Model::Extensible => (3, 0),
            Model::Chain { fork_probability } => (4, fork_probability.to_bits()),
            Model::Blinkered { fork_probability } => (5, fork_probability.to_bits()),
        };
        seeds::derive_seed(tag, &[self.symbols as u64, self.words as u64, extra])
    }
}

/// How one word came to be, recorded for replay checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// The initial single-symbol word `[α∘]`.
    Root,
    /// Drawn independently (fixed dictionaries).
    Drawn,
    /// `[α∘]` followed by the listed appended symbols.
    Appended { symbols: Vec<SymbolId> },
    /// Existing word `parent` extended by one symbol.
    Extend { parent: usize, symbol: SymbolId },
    /// Existing words `first` and `second` concatenated.
    Concat { first: usize, second: usize },
    /// Accepted single-symbol fork.
    Fork { symbol: SymbolId },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructionLog {
    /// One entry per dictionary word, in word order.
    pub steps: Vec<Construction>,
    pub proposals: usize,
    pub fork_proposals: usize,
    pub rejected: usize,
}

impl ConstructionLog {
    pub fn accepted_forks(&self) -> usize {
        self.steps
            .iter()
            .filter(|c| matches!(c, Construction::Fork { .. }))
            .count()
    }
}

/// Null dictionary: nominal sizes only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NullDictionary {
    pub symbols: usize,
    pub words: usize,
    pub seed: u64,
}

/// Result of interrogating a null dictionary with `N` known symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullInterrogation {
    pub knowable_count: usize,
    /// Usefulness of each known symbol: a random permutation of `1..=N`.
    pub usefulness: Vec<u64>,
}

/// `W = round(N·D/S)` with a freshly drawn strict usefulness ordering.
pub fn interrogate_null(nd: &NullDictionary, known: usize, rng: &mut SimRng) -> NullInterrogation {
    debug_assert!(known <= nd.symbols);
    // round half up
    let knowable_count = (2 * known * nd.words + nd.symbols) / (2 * nd.symbols);
    let mut usefulness: Vec<u64> = (1..=known as u64).collect();
    usefulness.shuffle(rng);
    NullInterrogation {
        knowable_count,
        usefulness,
    }
}

/// A generated world: a real dictionary or a null one.
#[derive(Clone, Debug, PartialEq)]
pub enum World {
    Real(Dictionary),
    Null(NullDictionary),
}

impl World {
    pub fn symbol_count(&self) -> usize {
        match self {
            World::Real(d) => d.symbol_count(),
            World::Null(n) => n.symbols,
        }
    }

    pub fn word_count(&self) -> usize {
        match self {
            World::Real(d) => d.word_count(),
            World::Null(n) => n.words,
        }
    }
}

pub fn generate(params: &GeneratorParams) -> Result<World> {
    params.validate()?;
    match params.model {
        Model::Null => Ok(World::Null(NullDictionary {
            symbols: params.symbols,
            words: params.words,
            seed: params.seed,
        })),
        _ => generate_with_log(params).map(|(d, _)| World::Real(d)),
    }
}

/// Generate a real dictionary; the null model is rejected.
pub fn generate_dictionary(params: &GeneratorParams) -> Result<Dictionary> {
    generate_with_log(params).map(|(d, _)| d)
}

pub fn generate_with_log(params: &GeneratorParams) -> Result<(Dictionary, ConstructionLog)> {
    params.validate()?;
    let mut rng = seeds::rng_from_seed(seeds::derive_seed(
        params.seed,
        &[seeds::stream::DICTIONARY],
    ));
    let s = params.symbols as u32;
    let (words, log, initial) = match params.model {
        Model::Null => return Err(Error::Unsupported("the null model has no word list".into())),
        Model::Fixed { word_length } => {
            let (w, l) = fixed(&mut rng, s, params.words, word_length);
            (w, l, None)
        }
        Model::Extensible => {
            let (w, l, a) = extensible(&mut rng, s, params.words)?;
            (w, l, Some(a))
        }
        Model::Chain { fork_probability } => {
            let (w, l, a) = grow(&mut rng, s, params.words, fork_probability, Growth::Chain)?;
            (w, l, Some(a))
        }
        Model::Blinkered { fork_probability } => {
            let (w, l, a) = grow(
                &mut rng,
                s,
                params.words,
                fork_probability,
                Growth::Blinkered,
            )?;
            (w, l, Some(a))
        }
    };
    let provenance = Provenance {
        params: Some(params.clone()),
        initial_symbol: initial,
    };
    Ok((Dictionary::new(words, params.symbols, provenance)?, log))
}

#[inline]
fn random_symbol(rng: &mut SimRng, s: u32) -> SymbolId {
    SymbolId(rng.random_range(0..s))
}

fn fixed(rng: &mut SimRng, s: u32, d: usize, l: usize) -> (Vec<Word>, ConstructionLog) {
    let words = (0..d)
        .map(|_| Word::from_vec_unchecked((0..l).map(|_| random_symbol(rng, s)).collect()))
        .collect();
    let log = ConstructionLog {
        steps: vec![Construction::Drawn; d],
        proposals: d,
        ..Default::default()
    };
    (words, log)
}

fn extensible(
    rng: &mut SimRng,
    s: u32,
    d: usize,
) -> Result<(Vec<Word>, ConstructionLog, SymbolId)> {
    let root = random_symbol(rng, s);
    let root_word = Word::from_vec_unchecked(vec![root]);
    let mut seen: HashSet<Word> = HashSet::with_capacity(d);
    let mut words = Vec::with_capacity(d);
    let mut log = ConstructionLog::default();
    seen.insert(root_word.clone());
    words.push(root_word);
    log.steps.push(Construction::Root);
    while words.len() < d {
        let mut candidate = vec![root];
        loop {
            if candidate.len() > EXTENSIBLE_APPEND_CAP {
                return Err(Error::AttemptCapExceeded {
                    what: "extensible word construction",
                    cap: EXTENSIBLE_APPEND_CAP,
                });
            }
            candidate.push(random_symbol(rng, s));
            log.proposals += 1;
            let word = Word::from_vec_unchecked(candidate.clone());
            if !seen.contains(&word) {
                seen.insert(word.clone());
                words.push(word);
                log.steps.push(Construction::Appended {
                    symbols: candidate[1..].to_vec(),
                });
                break;
            }
            log.rejected += 1;
        }
    }
    Ok((words, log, root))
}

#[derive(Clone, Copy)]
enum Growth {
    Chain,
    Blinkered,
}

fn grow(
    rng: &mut SimRng,
    s: u32,
    d: usize,
    fork: f64,
    growth: Growth,
) -> Result<(Vec<Word>, ConstructionLog, SymbolId)> {
    let root = random_symbol(rng, s);
    let root_word = Word::from_vec_unchecked(vec![root]);
    let mut seen: HashSet<Word> = HashSet::with_capacity(d);
    let mut words = Vec::with_capacity(d);
    let mut log = ConstructionLog::default();
    seen.insert(root_word.clone());
    words.push(root_word);
    log.steps.push(Construction::Root);
    while words.len() < d {
        if log.proposals >= PROPOSAL_CAP {
            return Err(Error::AttemptCapExceeded {
                what: "chain/blinkered proposal",
                cap: PROPOSAL_CAP,
            });
        }
        log.proposals += 1;
        // A rejected proposal redraws the branch from scratch.
        let (word, step) = if rng.random_bool(fork) {
            log.fork_proposals += 1;
            let symbol = random_symbol(rng, s);
            (
                Word::from_vec_unchecked(vec![symbol]),
                Construction::Fork { symbol },
            )
        } else {
            let n = words.len() as u32;
            match growth {
                Growth::Chain => {
                    let parent = rng.random_range(0..n) as usize;
                    let symbol = random_symbol(rng, s);
                    (
                        words[parent].extended(symbol),
                        Construction::Extend { parent, symbol },
                    )
                }
                Growth::Blinkered => {
                    let first = rng.random_range(0..n) as usize;
                    let second = rng.random_range(0..n) as usize;
                    (
                        words[first].concat(&words[second]),
                        Construction::Concat { first, second },
                    )
                }
            }
        };
        if seen.contains(&word) {
            log.rejected += 1;
            continue;
        }
        seen.insert(word.clone());
        words.push(word);
        log.steps.push(step);
    }
    Ok((words, log, root))
}

/// Rebuild every word from its construction log; used to check generator output.
pub fn replay_construction(
    log: &ConstructionLog,
    initial_symbol: Option<SymbolId>,
) -> Option<Vec<Vec<SymbolId>>> {
    let mut out: Vec<Vec<SymbolId>> = Vec::with_capacity(log.steps.len());
    for step in &log.steps {
        let w = match step {
            Construction::Root => vec![initial_symbol?],
            Construction::Drawn => return None,
            Construction::Appended { symbols } => {
                let mut w = vec![initial_symbol?];
                w.extend_from_slice(symbols);
                w
            }
            Construction::Extend { parent, symbol } => {
                let mut w = out.get(*parent)?.clone();
                w.push(*symbol);
                w
            }
            Construction::Concat { first, second } => {
                let mut w = out.get(*first)?.clone();
                w.extend_from_slice(out.get(*second)?);
                w
            }
            Construction::Fork { symbol } => vec![*symbol],
        };
        out.push(w);
    }
    Some(out)
}
