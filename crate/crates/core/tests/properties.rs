//! Property tests over small random dictionaries.

use innodict_core::measures::step_contributions;
use innodict_core::{
    delta_chi, delta_omega, delta_r, knowable_words, occurrence_distribution, run_discovery,
    usefulness, Dictionary, DiscoveryOrder, MeasureConventions, OccurrenceMode, Provenance,
    SymbolId, Word,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn dictionary() -> impl Strategy<Value = Dictionary> {
    (1usize..9).prop_flat_map(|s| {
        prop::collection::vec(prop::collection::vec(0..s as u32, 1..5), 1..48).prop_map(
            move |raw| {
                let words = raw
                    .into_iter()
                    .map(|w| Word::from_ids(&w).unwrap())
                    .collect();
                Dictionary::new(words, s, Provenance::default()).unwrap()
            },
        )
    })
}

fn dictionary_and_order() -> impl Strategy<Value = (Dictionary, Vec<SymbolId>)> {
    dictionary().prop_flat_map(|d| {
        let ids: Vec<SymbolId> = (0..d.symbol_count() as u32).map(SymbolId).collect();
        (Just(d), Just(ids).prop_shuffle())
    })
}

fn order(sequence: Vec<SymbolId>) -> DiscoveryOrder {
    DiscoveryOrder {
        sequence,
        strategy: innodict_core::Strategy::Random,
        seed: 0,
    }
}

fn relabel(d: &Dictionary, perm: &[u32]) -> Dictionary {
    let words = d
        .words()
        .iter()
        .map(|w| {
            Word::new(
                w.symbols()
                    .iter()
                    .map(|s| SymbolId(perm[s.index()]))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    Dictionary::new(words, d.symbol_count(), Provenance::default()).unwrap()
}

proptest! {
    #[test]
    fn knowledge_is_monotone((d, seq) in dictionary_and_order(), cut in 0usize..9) {
        let small = &seq[..cut.min(seq.len())];
        let a = knowable_words(&d, small).unwrap();
        let b = knowable_words(&d, &seq).unwrap();
        prop_assert!(a.knowable_indices().iter().all(|i| b.knowable_indices().contains(i)));
        let (ua, ub) = (usefulness(&d, &a), usefulness(&d, &b));
        for &s in small {
            prop_assert!(ua.get(s).unwrap() <= ub.get(s).unwrap());
        }
        prop_assert!(ub.total() >= b.knowable_count() as u64);
    }

    #[test]
    fn distribution_sums_to_one((d, seq) in dictionary_and_order(), token in any::<bool>()) {
        let mode = if token { OccurrenceMode::Token } else { OccurrenceMode::Membership };
        let state = knowable_words(&d, &seq).unwrap();
        let p = occurrence_distribution(&d, &state, mode).unwrap();
        let total: f64 = p.iter().map(|(_, x)| x).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_invariants((d, seq) in dictionary_and_order()) {
        let t = run_discovery(&d, &order(seq)).unwrap();
        prop_assert_eq!(t.snapshots.len(), d.symbol_count());
        let mut last = 0;
        for (k, s) in t.snapshots.iter().enumerate() {
            let n = (k + 1) as f64;
            prop_assert_eq!(s.known_count, k + 1);
            prop_assert_eq!(s.ranks.sum(), n * (n + 1.0) / 2.0);
            prop_assert!(s.knowable_count >= last);
            last = s.knowable_count;
            if let Some(e) = s.entropy {
                prop_assert!(e <= n.log2() + 1e-12);
            }
        }
        prop_assert_eq!(t.snapshots.last().unwrap().fraction_discovered, 1.0);
    }

    #[test]
    fn measures_ignore_labels((d, seq) in dictionary_and_order(), seed in any::<u64>()) {
        let s = d.symbol_count();
        let mut perm: Vec<u32> = (0..s as u32).collect();
        // cheap deterministic shuffle driven by the seed
        let mut x = seed | 1;
        for i in (1..s).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            perm.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let moved = relabel(&d, &perm);
        let moved_seq: Vec<SymbolId> = seq.iter().map(|a| SymbolId(perm[a.index()])).collect();
        let conv = MeasureConventions::default();
        let t1 = run_discovery(&d, &order(seq)).unwrap();
        let t2 = run_discovery(&moved, &order(moved_seq)).unwrap();
        prop_assert_eq!(delta_r(&t1, &conv), delta_r(&t2, &conv));
        prop_assert_eq!(delta_omega(&t1, &conv), delta_omega(&t2, &conv));
        prop_assert_eq!(delta_chi(&t1, &conv), delta_chi(&t2, &conv));
    }

    #[test]
    fn omega_zero_iff_r_zero((d, seq) in dictionary_and_order()) {
        let t = run_discovery(&d, &order(seq)).unwrap();
        let history: Vec<_> = t.snapshots.iter().map(|s| s.ranks.clone()).collect();
        for c in step_contributions(&history, &MeasureConventions::default()) {
            prop_assert_eq!(c.omega == 0.0, c.r == 0.0);
            prop_assert_eq!(c.chi == 0.0, c.r == 0.0);
        }
        let conv = MeasureConventions::default();
        let all_zero = delta_r(&t, &conv) == 0.0;
        prop_assert_eq!(all_zero, delta_omega(&t, &conv) == 0.0);
    }

    #[test]
    fn known_subsets_only_grow(d in dictionary(), picks in subsequence((0u32..8).collect::<Vec<_>>(), 0..8)) {
        let known: Vec<SymbolId> = picks.into_iter().filter(|&x| (x as usize) < d.symbol_count()).map(SymbolId).collect();
        let state = knowable_words(&d, &known).unwrap();
        for &i in state.knowable_indices() {
            prop_assert!(d.words()[i].symbols().iter().all(|s| known.contains(s)));
        }
    }
}
