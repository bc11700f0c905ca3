//! Discovery orders and the discovery process.
//!
//! A discovery reveals the symbols of a dictionary one at a time in some
//! order. After each reveal the sub-dictionary of knowable words grows and
//! a [`StepSnapshot`] records usefulness, ranks, entropy and word counts.

use rand::seq::SliceRandom;
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{interrogate_null, NullDictionary, World};
use crate::measures::{rank_with_tie_averaging, symbol_entropy, RankVector};
use crate::model::{Dictionary, OccurrenceMode, Provenance, SymbolId};
use crate::seeds;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Most useful (in the world dictionary) first.
    Frequency,
    Random,
    /// Least useful first.
    ReverseFrequency,
    /// Without replacement, weighted by `u + 1`.
    FrequencyWeighted,
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Frequency => "frequency",
            Strategy::Random => "random",
            Strategy::ReverseFrequency => "reverse-frequency",
            Strategy::FrequencyWeighted => "frequency-weighted",
        }
    }

    /// Whether different seeds give different orders for the same dictionary
    /// beyond tie-breaking.
    pub fn is_randomised(&self) -> bool {
        matches!(self, Strategy::Random | Strategy::FrequencyWeighted)
    }

    pub(crate) fn code(&self) -> u64 {
        match self {
            Strategy::Frequency => 1,
            Strategy::Random => 2,
            Strategy::ReverseFrequency => 3,
            Strategy::FrequencyWeighted => 4,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(Strategy::Frequency),
            "random" => Ok(Strategy::Random),
            "reverse-frequency" => Ok(Strategy::ReverseFrequency),
            "frequency-weighted" => Ok(Strategy::FrequencyWeighted),
            other => Err(Error::Config(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryOrder {
    pub sequence: Vec<SymbolId>,
    pub strategy: Strategy,
    pub seed: u64,
}

/// Usefulness of every symbol in the complete dictionary.
pub fn world_usefulness(dictionary: &Dictionary) -> Vec<u64> {
    let mut counts = vec![0u64; dictionary.symbol_count()];
    for w in dictionary.words() {
        for s in w.distinct_symbols() {
            counts[s.index()] += 1;
        }
    }
    counts
}

fn shuffled_symbols(s: usize, rng: &mut seeds::SimRng) -> Vec<SymbolId> {
    let mut v: Vec<SymbolId> = (0..s as u32).map(SymbolId).collect();
    v.shuffle(rng);
    v
}

fn frequency_sequence(dictionary: &Dictionary, seed: u64) -> Vec<SymbolId> {
    let u = world_usefulness(dictionary);
    let mut rng = seeds::rng_from_seed(seed);
    // shuffle then stable sort: ties end up in random order
    let mut seq = shuffled_symbols(dictionary.symbol_count(), &mut rng);
    seq.sort_by(|a, b| u[b.index()].cmp(&u[a.index()]));
    seq
}

pub fn order_frequency(dictionary: &Dictionary, seed: u64) -> DiscoveryOrder {
    DiscoveryOrder {
        sequence: frequency_sequence(dictionary, seed),
        strategy: Strategy::Frequency,
        seed,
    }
}

pub fn order_reverse_frequency(dictionary: &Dictionary, seed: u64) -> DiscoveryOrder {
    let mut sequence = frequency_sequence(dictionary, seed);
    sequence.reverse();
    DiscoveryOrder {
        sequence,
        strategy: Strategy::ReverseFrequency,
        seed,
    }
}

pub fn order_random(symbol_count: usize, seed: u64) -> DiscoveryOrder {
    let mut rng = seeds::rng_from_seed(seed);
    DiscoveryOrder {
        sequence: shuffled_symbols(symbol_count, &mut rng),
        strategy: Strategy::Random,
        seed,
    }
}

pub fn order_frequency_weighted(dictionary: &Dictionary, seed: u64) -> DiscoveryOrder {
    let mut rng = seeds::rng_from_seed(seed);
    let mut pool: Vec<(SymbolId, u64)> = world_usefulness(dictionary)
        .into_iter()
        .enumerate()
        .map(|(i, u)| (SymbolId(i as u32), u + 1))
        .collect();
    let mut total: u64 = pool.iter().map(|p| p.1).sum();
    let mut sequence = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let mut target = rng.random_range(0..total);
        let pos = pool
            .iter()
            .position(|&(_, w)| {
                if target < w {
                    true
                } else {
                    target -= w;
                    false
                }
            })
            .expect("target below total weight");
        let (s, w) = pool.remove(pos);
        total -= w;
        sequence.push(s);
    }
    DiscoveryOrder {
        sequence,
        strategy: Strategy::FrequencyWeighted,
        seed,
    }
}

/// Build the order for `strategy`. Null worlds have no fixed frequencies
/// (they are redrawn on every interrogation), so every strategy maps to a
/// fresh random permutation there.
pub fn make_order(world: &World, strategy: Strategy, seed: u64) -> DiscoveryOrder {
    match world {
        World::Null(nd) => DiscoveryOrder {
            strategy,
            ..order_random(nd.symbols, seed)
        },
        World::Real(d) => match strategy {
            Strategy::Frequency => order_frequency(d, seed),
            Strategy::Random => order_random(d.symbol_count(), seed),
            Strategy::ReverseFrequency => order_reverse_frequency(d, seed),
            Strategy::FrequencyWeighted => order_frequency_weighted(d, seed),
        },
    }
}

/// State after the `step`-th discovery. Per-symbol vectors are aligned with
/// the discovery order: entry `j` is the `j`-th discovered symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSnapshot {
    pub step: usize,
    pub discovered: SymbolId,
    pub known_count: usize,
    pub knowable_count: usize,
    pub usefulness: Vec<u64>,
    pub ranks: RankVector,
    /// `None` while no word is knowable (and always for null worlds).
    pub entropy: Option<f64>,
    pub mean_freq: Option<f64>,
    /// Population standard deviation of usefulness over known symbols.
    pub sd_freq: Option<f64>,
    pub fraction_discovered: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryTrace {
    pub provenance: Provenance,
    pub order: DiscoveryOrder,
    pub symbol_count: usize,
    pub word_count: usize,
    pub snapshots: Vec<StepSnapshot>,
}

fn check_order(symbol_count: usize, order: &DiscoveryOrder) -> Result<()> {
    if order.sequence.len() != symbol_count {
        return Err(Error::SymbolCountMismatch {
            dictionary: symbol_count,
            order: order.sequence.len(),
        });
    }
    let mut seen = vec![false; symbol_count];
    for s in &order.sequence {
        match seen.get_mut(s.index()) {
            Some(flag) if !*flag => *flag = true,
            _ => return Err(Error::NotAPermutation),
        }
    }
    Ok(())
}

fn mean_sd(values: &[u64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<u64>() as f64 / n;
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, var.sqrt())
}

fn entropy_of(weights: &[u64]) -> f64 {
    let total: u64 = weights.iter().sum();
    let p: Vec<f64> = weights.iter().map(|&w| w as f64 / total as f64).collect();
    symbol_entropy(&p)
}

/// Run a full discovery over a real dictionary with membership-based entropy.
pub fn run_discovery(dictionary: &Dictionary, order: &DiscoveryOrder) -> Result<DiscoveryTrace> {
    run_discovery_with(dictionary, order, OccurrenceMode::Membership)
}

pub fn run_discovery_with(
    dictionary: &Dictionary,
    order: &DiscoveryOrder,
    mode: OccurrenceMode,
) -> Result<DiscoveryTrace> {
    let s = dictionary.symbol_count();
    check_order(s, order)?;

    // words indexed by the distinct symbols they contain
    let mut by_symbol: Vec<Vec<usize>> = vec![Vec::new(); s];
    let mut distinct: Vec<Vec<(SymbolId, u64)>> = Vec::with_capacity(dictionary.word_count());
    for (w, word) in dictionary.words().iter().enumerate() {
        let mut d: Vec<(SymbolId, u64)> = Vec::new();
        for &sym in word.symbols() {
            match d.iter_mut().find(|(x, _)| *x == sym) {
                Some((_, c)) => *c += 1,
                None => d.push((sym, 1)),
            }
        }
        for &(sym, _) in &d {
            by_symbol[sym.index()].push(w);
        }
        distinct.push(d);
    }
    let mut missing: Vec<usize> = distinct.iter().map(Vec::len).collect();

    // position of each symbol in the discovery order
    let mut slot = vec![0usize; s];
    for (j, sym) in order.sequence.iter().enumerate() {
        slot[sym.index()] = j;
    }

    let d_total = dictionary.word_count();
    let mut u = vec![0u64; s];
    let mut tokens = vec![0u64; s];
    let mut knowable = 0usize;
    let mut snapshots = Vec::with_capacity(s);
    for (k, &sym) in order.sequence.iter().enumerate() {
        for &w in &by_symbol[sym.index()] {
            missing[w] -= 1;
            if missing[w] == 0 {
                knowable += 1;
                for &(x, c) in &distinct[w] {
                    u[slot[x.index()]] += 1;
                    tokens[slot[x.index()]] += c;
                }
            }
        }
        let n = k + 1;
        let usefulness = u[..n].to_vec();
        let ranks = rank_with_tie_averaging(&usefulness);
        let (entropy, mean_freq, sd_freq) = if knowable == 0 {
            (None, None, None)
        } else {
            let weights = match mode {
                OccurrenceMode::Membership => &u[..n],
                OccurrenceMode::Token => &tokens[..n],
            };
            let (m, sd) = mean_sd(&usefulness);
            (Some(entropy_of(weights)), Some(m), Some(sd))
        };
        snapshots.push(StepSnapshot {
            step: n,
            discovered: sym,
            known_count: n,
            knowable_count: knowable,
            usefulness,
            ranks,
            entropy,
            mean_freq,
            sd_freq,
            fraction_discovered: if d_total == 0 {
                0.0
            } else {
                knowable as f64 / d_total as f64
            },
        });
    }
    Ok(DiscoveryTrace {
        provenance: dictionary.provenance().clone(),
        order: order.clone(),
        symbol_count: s,
        word_count: d_total,
        snapshots,
    })
}

/// Discovery on a null dictionary. Each step re-interrogates, drawing a
/// fresh usefulness ordering; entropy and frequency statistics are undefined.
pub fn run_null_discovery(
    nd: &NullDictionary,
    order: &DiscoveryOrder,
    interrogation_seed: u64,
) -> Result<DiscoveryTrace> {
    check_order(nd.symbols, order)?;
    let mut rng = seeds::rng_from_seed(interrogation_seed);
    let snapshots = order
        .sequence
        .iter()
        .enumerate()
        .map(|(k, &sym)| {
            let n = k + 1;
            let answer = interrogate_null(nd, n, &mut rng);
            StepSnapshot {
                step: n,
                discovered: sym,
                known_count: n,
                knowable_count: answer.knowable_count,
                ranks: rank_with_tie_averaging(&answer.usefulness),
                usefulness: answer.usefulness,
                entropy: None,
                mean_freq: None,
                sd_freq: None,
                fraction_discovered: answer.knowable_count as f64 / nd.words as f64,
            }
        })
        .collect();
    Ok(DiscoveryTrace {
        provenance: Provenance::default(),
        order: order.clone(),
        symbol_count: nd.symbols,
        word_count: nd.words,
        snapshots,
    })
}

/// Run any world; null interrogations draw from a stream derived from the
/// null dictionary's seed and the order seed.
pub fn run_world(
    world: &World,
    order: &DiscoveryOrder,
    mode: OccurrenceMode,
) -> Result<DiscoveryTrace> {
    match world {
        World::Real(d) => run_discovery_with(d, order, mode),
        World::Null(nd) => run_null_discovery(
            nd,
            order,
            seeds::derive_seed(nd.seed, &[seeds::stream::NULL_INTERROGATION, order.seed]),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, generate_dictionary, GeneratorParams, Model};
    use crate::model::{knowable_words, usefulness};
    use std::collections::HashMap;

    fn ids(v: &[u32]) -> Vec<SymbolId> {
        v.iter().copied().map(SymbolId).collect()
    }

    #[test]
    fn frequency_order_example() {
        let d = Dictionary::from_id_lists(&[&[0], &[0, 1], &[0, 1]], 3).unwrap();
        for seed in 0..10 {
            assert_eq!(order_frequency(&d, seed).sequence, ids(&[0, 1, 2]));
            assert_eq!(order_reverse_frequency(&d, seed).sequence, ids(&[2, 1, 0]));
        }
    }

    #[test]
    fn frequency_ties_are_randomised() {
        let d = Dictionary::from_id_lists(&[&[0, 1]], 2).unwrap();
        let firsts: std::collections::HashSet<u32> = (0..32)
            .map(|seed| order_frequency(&d, seed).sequence[0].0)
            .collect();
        assert_eq!(firsts.len(), 2);
    }

    #[test]
    fn chain_root_first() {
        let d = generate_dictionary(&GeneratorParams::new(
            Model::Chain {
                fork_probability: 1e-9,
            },
            32,
            200,
            3,
        ))
        .unwrap();
        let root = d.provenance().initial_symbol.unwrap();
        assert_eq!(order_frequency(&d, 1).sequence[0], root);
    }

    #[test]
    fn random_order_basics() {
        assert_eq!(order_random(1, 5).sequence, ids(&[0]));
        assert_eq!(order_random(10, 5), order_random(10, 5));
    }

    #[test]
    fn random_order_uniform_over_permutations() {
        // 6000 draws over 6 permutations; 5 dof, p = 0.001 critical value 20.515.
        let mut counts: HashMap<Vec<SymbolId>, f64> = HashMap::new();
        for seed in 0..6000 {
            *counts.entry(order_random(3, seed).sequence).or_default() += 1.0;
        }
        assert_eq!(counts.len(), 6);
        let chi2: f64 = counts.values().map(|c| (c - 1000.0).powi(2) / 1000.0).sum();
        assert!(chi2 < 20.515, "chi2 = {chi2}");
    }

    #[test]
    fn weighted_first_pick_probability() {
        // u = (D, 0, 0) with D = 10: first pick is 0 with probability 11/13.
        let d = Dictionary::from_id_lists(&[&[0u32][..]; 10], 3).unwrap();
        let trials: f64 = 10_000.0;
        let hits = (0..10_000)
            .filter(|&seed| order_frequency_weighted(&d, seed).sequence[0] == SymbolId(0))
            .count() as f64;
        let p = 11.0 / 13.0;
        let sigma = (trials * p * (1.0 - p)).sqrt();
        assert!((hits - trials * p).abs() < 3.0 * sigma, "{hits}");
    }

    #[test]
    fn weighted_is_permutation() {
        let d = generate_dictionary(&GeneratorParams::new(Model::Extensible, 16, 100, 1)).unwrap();
        let mut seq = order_frequency_weighted(&d, 9).sequence;
        seq.sort();
        assert_eq!(seq, (0..16).map(SymbolId).collect::<Vec<_>>());
    }

    #[test]
    fn trace_matches_direct_recount() {
        let d = generate_dictionary(&GeneratorParams::new(
            Model::Fixed { word_length: 3 },
            6,
            40,
            8,
        ))
        .unwrap();
        let order = order_random(6, 2);
        let t = run_discovery(&d, &order).unwrap();
        for snap in &t.snapshots {
            let known = &order.sequence[..snap.known_count];
            let st = knowable_words(&d, known).unwrap();
            assert_eq!(st.knowable_count(), snap.knowable_count);
            let u = usefulness(&d, &st);
            for (j, s) in known.iter().enumerate() {
                assert_eq!(u.get(*s), Some(snap.usefulness[j]));
            }
        }
    }

    #[test]
    fn final_snapshot_is_complete() {
        for model in [
            Model::Fixed { word_length: 8 },
            Model::Extensible,
            Model::Chain {
                fork_probability: 0.1,
            },
        ] {
            let d = generate_dictionary(&GeneratorParams::new(model, 32, 256, 4)).unwrap();
            let t = run_discovery(&d, &order_random(32, 1)).unwrap();
            let last = t.snapshots.last().unwrap();
            assert_eq!(last.fraction_discovered, 1.0);
            assert_eq!(last.knowable_count, 256);
            assert!(t
                .snapshots
                .windows(2)
                .all(|w| w[0].knowable_count <= w[1].knowable_count));
            for s in &t.snapshots {
                assert_eq!(s.entropy.is_some(), s.knowable_count >= 1);
                assert_eq!(
                    s.ranks.sum(),
                    (s.known_count * (s.known_count + 1)) as f64 / 2.0
                );
            }
        }
    }

    #[test]
    fn fixed_onset_needs_words() {
        let d = generate_dictionary(&GeneratorParams::new(
            Model::Fixed { word_length: 8 },
            32,
            1024,
            6,
        ))
        .unwrap();
        for seed in 0..8 {
            let t = run_discovery(&d, &order_random(32, seed)).unwrap();
            for snap in &t.snapshots {
                let known = &t.order.sequence[..snap.known_count];
                let direct = d
                    .words()
                    .iter()
                    .filter(|w| w.symbols().iter().all(|s| known.contains(s)))
                    .count();
                assert_eq!(direct, snap.knowable_count);
            }
            assert_eq!(t.snapshots[0].knowable_count, 0);
        }
    }

    #[test]
    fn extensible_frequency_starts_immediately() {
        let d = generate_dictionary(&GeneratorParams::new(Model::Extensible, 32, 1024, 5)).unwrap();
        let t = run_discovery(&d, &order_frequency(&d, 0)).unwrap();
        assert!(t.snapshots[0].knowable_count >= 1);
    }

    #[test]
    fn mismatched_orders_rejected() {
        let d = Dictionary::from_id_lists(&[&[0, 1]], 2).unwrap();
        let bad = DiscoveryOrder {
            sequence: ids(&[0]),
            strategy: Strategy::Random,
            seed: 0,
        };
        assert!(matches!(
            run_discovery(&d, &bad),
            Err(Error::SymbolCountMismatch { .. })
        ));
        let dup = DiscoveryOrder {
            sequence: ids(&[0, 0]),
            strategy: Strategy::Random,
            seed: 0,
        };
        assert!(matches!(
            run_discovery(&d, &dup),
            Err(Error::NotAPermutation)
        ));
    }

    #[test]
    fn null_trace() {
        let world = generate(&GeneratorParams::new(Model::Null, 8, 64, 1)).unwrap();
        let order = make_order(&world, Strategy::Frequency, 3);
        let t = run_world(&world, &order, OccurrenceMode::Membership).unwrap();
        assert_eq!(t.snapshots.len(), 8);
        assert_eq!(t.snapshots[7].knowable_count, 64);
        assert!(t.snapshots.iter().all(|s| s.entropy.is_none()));
        assert_eq!(
            t,
            run_world(&world, &order, OccurrenceMode::Membership).unwrap()
        );
    }

    #[test]
    fn replay_from_provenance() {
        let d = generate_dictionary(&GeneratorParams::new(
            Model::Blinkered {
                fork_probability: 0.2,
            },
            16,
            200,
            12,
        ))
        .unwrap();
        let t = run_discovery(&d, &order_frequency_weighted(&d, 44)).unwrap();
        let again = generate_dictionary(t.provenance.params.as_ref().unwrap()).unwrap();
        let order = make_order(&World::Real(again.clone()), t.order.strategy, t.order.seed);
        assert_eq!(run_discovery(&again, &order).unwrap(), t);
    }
}
