//! Dictionary and knowledge-state data model.
//!
//! A dictionary is a list of words over a symbol list of size `S`. At any
//! point of a discovery process only some symbols are known; the words all
//! of whose symbols are known form the sub-dictionary of knowable words, and
//! a symbol's usefulness is the number of knowable words it appears in.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorParams;

/// Index of a symbol in `[0, S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolId(pub u32);

impl SymbolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A non-empty string of symbols. Repeats are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<SymbolId>);

impl Word {
    pub fn new(symbols: Vec<SymbolId>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(symbols))
    }

    /// Convenience constructor from raw ids.
    pub fn from_ids(ids: &[u32]) -> Result<Self> {
        Word::new(ids.iter().copied().map(SymbolId).collect())
    }

    pub(crate) fn from_vec_unchecked(symbols: Vec<SymbolId>) -> Self {
        debug_assert!(!symbols.is_empty());
        Word(symbols)
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, symbol: SymbolId) -> bool {
        self.0.contains(&symbol)
    }

    /// Distinct symbols in first-appearance order.
    pub fn distinct_symbols(&self) -> Vec<SymbolId> {
        let mut out: Vec<SymbolId> = Vec::with_capacity(self.0.len());
        for &s in &self.0 {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    pub(crate) fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub(crate) fn extended(&self, symbol: SymbolId) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(symbol);
        Word(v)
    }
}

/// Where a dictionary came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Generator parameters, `None` for hand-built dictionaries.
    pub params: Option<GeneratorParams>,
    /// The initial symbol for E/C/B dictionaries.
    pub initial_symbol: Option<SymbolId>,
}

/// An immutable world dictionary.
#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    words: Vec<Word>,
    symbol_count: usize,
    provenance: Provenance,
}

impl Dictionary {
    pub fn new(words: Vec<Word>, symbol_count: usize, provenance: Provenance) -> Result<Self> {
        if symbol_count == 0 {
            return Err(Error::InvalidParams(
                "symbol count must be at least 1".into(),
            ));
        }
        for word in &words {
            for &s in word.symbols() {
                check_symbol(s, symbol_count)?;
            }
        }
        Ok(Dictionary {
            words,
            symbol_count,
            provenance,
        })
    }

    /// Hand-built dictionary from raw id lists.
    pub fn from_id_lists(lists: &[&[u32]], symbol_count: usize) -> Result<Self> {
        let words = lists
            .iter()
            .map(|ids| Word::from_ids(ids))
            .collect::<Result<Vec<_>>>()?;
        Dictionary::new(words, symbol_count, Provenance::default())
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// `D`.
    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// `S`.
    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

fn check_symbol(s: SymbolId, symbol_count: usize) -> Result<()> {
    if s.index() >= symbol_count {
        Err(Error::SymbolOutOfRange {
            id: s.0,
            symbol_count,
        })
    } else {
        Ok(())
    }
}

/// Known symbols and the words they make knowable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeState {
    known: FixedBitSet,
    knowable: Vec<usize>,
}

impl KnowledgeState {
    /// `N`.
    pub fn known_count(&self) -> usize {
        self.known.count_ones(..)
    }

    /// `W_known`.
    pub fn knowable_count(&self) -> usize {
        self.knowable.len()
    }

    pub fn is_known(&self, symbol: SymbolId) -> bool {
        self.known.contains(symbol.index())
    }

    pub fn known_symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.known.ones().map(|i| SymbolId(i as u32))
    }

    /// Ascending indices into the dictionary's word list.
    pub fn knowable_indices(&self) -> &[usize] {
        &self.knowable
    }
}

/// Build the knowledge state for a set of known symbols.
pub fn knowable_words(dictionary: &Dictionary, known: &[SymbolId]) -> Result<KnowledgeState> {
    let mut set = FixedBitSet::with_capacity(dictionary.symbol_count());
    for &s in known {
        check_symbol(s, dictionary.symbol_count())?;
        set.insert(s.index());
    }
    let knowable = dictionary
        .words()
        .iter()
        .enumerate()
        .filter(|(_, w)| w.symbols().iter().all(|s| set.contains(s.index())))
        .map(|(i, _)| i)
        .collect();
    Ok(KnowledgeState {
        known: set,
        knowable,
    })
}

/// Usefulness counts for the known symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsefulnessTable {
    counts: Vec<u64>,
    known: FixedBitSet,
}

impl UsefulnessTable {
    /// `u[α]`, or `None` when `α` is unknown.
    pub fn get(&self, symbol: SymbolId) -> Option<u64> {
        if self.known.contains(symbol.index()) {
            Some(self.counts[symbol.index()])
        } else {
            None
        }
    }

    /// `(symbol, u)` for every known symbol in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, u64)> + '_ {
        self.known
            .ones()
            .map(|i| (SymbolId(i as u32), self.counts[i]))
    }

    pub fn total(&self) -> u64 {
        self.iter().map(|(_, u)| u).sum()
    }
}

/// Count, for each known symbol, the knowable words containing it.
/// A word with a repeated symbol counts once for that symbol.
pub fn usefulness(dictionary: &Dictionary, state: &KnowledgeState) -> UsefulnessTable {
    let mut counts = vec![0u64; dictionary.symbol_count()];
    let mut seen = FixedBitSet::with_capacity(dictionary.symbol_count());
    for &w in state.knowable_indices() {
        seen.clear();
        for &s in dictionary.words()[w].symbols() {
            if !seen.put(s.index()) {
                counts[s.index()] += 1;
            }
        }
    }
    UsefulnessTable {
        counts,
        known: state.known.clone(),
    }
}

/// How symbol probabilities for the entropy are normalised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OccurrenceMode {
    /// `u_i / Σ u_j` (word-membership counts).
    #[default]
    Membership,
    /// Symbol token counts over all knowable words, repeats included.
    Token,
}

/// Probability of each known symbol (ascending id order) being in a knowable word.
pub fn occurrence_distribution(
    dictionary: &Dictionary,
    state: &KnowledgeState,
    mode: OccurrenceMode,
) -> Result<Vec<(SymbolId, f64)>> {
    if state.knowable_count() == 0 {
        return Err(Error::EntropyUndefined);
    }
    let weights: Vec<(SymbolId, u64)> = match mode {
        OccurrenceMode::Membership => usefulness(dictionary, state).iter().collect(),
        OccurrenceMode::Token => {
            let mut counts = vec![0u64; dictionary.symbol_count()];
            for &w in state.knowable_indices() {
                for &s in dictionary.words()[w].symbols() {
                    counts[s.index()] += 1;
                }
            }
            state
                .known_symbols()
                .map(|s| (s, counts[s.index()]))
                .collect()
        }
    };
    let total: u64 = weights.iter().map(|&(_, c)| c).sum();
    Ok(weights
        .into_iter()
        .map(|(s, c)| (s, c as f64 / total as f64))
        .collect())
}

/// Number of symbols in `[0, S)` that appear in no word.
pub fn unused_symbol_count(dictionary: &Dictionary) -> usize {
    let mut used = FixedBitSet::with_capacity(dictionary.symbol_count());
    for w in dictionary.words() {
        for &s in w.symbols() {
            used.insert(s.index());
        }
    }
    dictionary.symbol_count() - used.count_ones(..)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<SymbolId> {
        v.iter().copied().map(SymbolId).collect()
    }

    fn small() -> Dictionary {
        Dictionary::from_id_lists(&[&[0, 1], &[0, 2], &[0]], 3).unwrap()
    }

    #[test]
    fn knowable_words_examples() {
        let d = small();
        assert_eq!(knowable_words(&d, &[]).unwrap().knowable_count(), 0);
        let st = knowable_words(&d, &ids(&[0, 1])).unwrap();
        assert_eq!(st.knowable_indices(), &[0, 2]);
        assert_eq!(st.knowable_count(), 2);
        assert_eq!(st.known_count(), 2);
        assert_eq!(
            knowable_words(&d, &ids(&[0, 1, 2]))
                .unwrap()
                .knowable_count(),
            3
        );
    }

    #[test]
    fn knowable_words_rejects_out_of_range() {
        let d = small();
        let err = knowable_words(&d, &ids(&[3])).unwrap_err();
        assert!(matches!(err, Error::SymbolOutOfRange { id: 3, .. }));
    }

    #[test]
    fn repeats_count_once() {
        let d = Dictionary::from_id_lists(&[&[0, 0, 0]], 1).unwrap();
        let st = knowable_words(&d, &ids(&[0])).unwrap();
        assert_eq!(usefulness(&d, &st).get(SymbolId(0)), Some(1));
    }

    #[test]
    fn usefulness_direct() {
        let d = small();
        let st = knowable_words(&d, &ids(&[0, 1])).unwrap();
        let u = usefulness(&d, &st);
        assert_eq!(u.get(SymbolId(0)), Some(2));
        assert_eq!(u.get(SymbolId(1)), Some(1));
        assert_eq!(u.get(SymbolId(2)), None);
    }

    #[test]
    fn known_but_unused_has_zero() {
        let d = Dictionary::from_id_lists(&[&[0]], 2).unwrap();
        let st = knowable_words(&d, &ids(&[0, 1])).unwrap();
        assert_eq!(usefulness(&d, &st).get(SymbolId(1)), Some(0));
    }

    #[test]
    fn occurrence_examples() {
        let d = Dictionary::from_id_lists(&[&[0]], 1).unwrap();
        let st = knowable_words(&d, &ids(&[0])).unwrap();
        let p = occurrence_distribution(&d, &st, OccurrenceMode::Membership).unwrap();
        assert_eq!(p, vec![(SymbolId(0), 1.0)]);

        let d = Dictionary::from_id_lists(&[&[0, 1], &[0], &[0, 1]], 2).unwrap();
        let st = knowable_words(&d, &ids(&[0, 1])).unwrap();
        let p = occurrence_distribution(&d, &st, OccurrenceMode::Membership).unwrap();
        assert_eq!(p, vec![(SymbolId(0), 0.6), (SymbolId(1), 0.4)]);

        let st = knowable_words(&d, &ids(&[1])).unwrap();
        assert!(matches!(
            occurrence_distribution(&d, &st, OccurrenceMode::Membership),
            Err(Error::EntropyUndefined)
        ));
    }

    #[test]
    fn token_mode_counts_repeats() {
        let d = Dictionary::from_id_lists(&[&[0, 0, 1]], 2).unwrap();
        let st = knowable_words(&d, &ids(&[0, 1])).unwrap();
        let p = occurrence_distribution(&d, &st, OccurrenceMode::Token).unwrap();
        assert!((p[0].1 - 2.0 / 3.0).abs() < 1e-15);
        let p = occurrence_distribution(&d, &st, OccurrenceMode::Membership).unwrap();
        assert_eq!(p[0].1, 0.5);
    }

    #[test]
    fn unused_examples() {
        let d = Dictionary::from_id_lists(&[&[0], &[0, 0]], 3).unwrap();
        assert_eq!(unused_symbol_count(&d), 2);
        assert_eq!(unused_symbol_count(&small()), 0);
    }

    #[test]
    fn dictionary_validation() {
        assert!(matches!(
            Dictionary::from_id_lists(&[&[0, 4]], 3),
            Err(Error::SymbolOutOfRange { id: 4, .. })
        ));
        assert!(matches!(
            Dictionary::from_id_lists(&[&[]], 3),
            Err(Error::EmptyWord)
        ));
    }
}
