//! Innovation measures over a discovery trace.
//!
//! Ranks are tie-averaged (a tie over positions 3 and 4 ranks both 3.5).
//! For each discovery step `n ≥ 2` the previously known symbols are compared
//! against their rank in the previous step, giving
//!
//! * `δ_r`: number of changed ranks / `N`
//! * `δ_ω`: `Σ |Δrank|` / (`N²/2`)
//! * `δ_χ`: `Σ Δrank²` / (`N³/4`)
//!
//! summed over the whole process. `N` is the known count after the discovery
//! by default; see [`MeasureConventions`] for the alternatives.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::discovery::DiscoveryTrace;
use crate::generators::World;
use crate::model::unused_symbol_count;

/// Tie-averaged ranks, aligned with the discovery order (entry `j` belongs
/// to the `j`-th discovered symbol).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankVector(pub Vec<f64>);

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Rank `values` in descending order (largest value gets rank 1), averaging ties.
pub fn rank_with_tie_averaging(values: &[u64]) -> RankVector {
    RankVector(tie_averaged(values, true))
}

/// Rank `values` in ascending order (smallest value gets rank 1), averaging ties.
pub fn rank_ascending(values: &[f64]) -> RankVector {
    RankVector(tie_averaged(values, false))
}

fn tie_averaged<T: PartialOrd + Copy>(values: &[T], descending: bool) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let cmp = |a: &usize, b: &usize| {
        let o = values[*a]
            .partial_cmp(&values[*b])
            .unwrap_or(Ordering::Equal);
        if descending {
            o.reverse()
        } else {
            o
        }
    };
    idx.sort_by(cmp);
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && cmp(&idx[start], &idx[end]) == Ordering::Equal {
            end += 1;
        }
        // positions start+1 ..= end share (p + q) / 2
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Which known count divides the per-step terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divisor {
    /// `N = n`, the count after the discovery.
    #[default]
    PostDiscovery,
    /// `N = n − 1`, the count of symbols that could have changed.
    PreDiscovery,
}

/// What `δ_r` counts as a change.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeCount {
    /// Only previously known symbols whose rank moved.
    #[default]
    PreviouslyKnown,
    /// As above, plus the newly discovered symbol, which always counts.
    AllKnown,
}

/// Normalisation denominators: `δ_ω` divides by `N²/omega`, `δ_χ` by `N³/chi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub omega: f64,
    pub chi: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            omega: 2.0,
            chi: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureConventions {
    pub divisor: Divisor,
    pub change_count: ChangeCount,
    pub normalization: Normalization,
}

/// Per-step contribution to each δ measure.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepContribution {
    /// Discovery index `n` (2..=S).
    pub step: usize,
    pub r: f64,
    pub omega: f64,
    pub chi: f64,
}

/// Per-step contributions over a rank history (`history[k]` has `k + 1` entries).
pub fn step_contributions(
    history: &[RankVector],
    conv: &MeasureConventions,
) -> Vec<StepContribution> {
    history
        .windows(2)
        .enumerate()
        .map(|(k, pair)| {
            let n = k + 2;
            let (prev, cur) = (pair[0].as_slice(), pair[1].as_slice());
            debug_assert_eq!(prev.len() + 1, cur.len());
            let mut changed = 0usize;
            let mut abs_sum = 0.0;
            let mut sq_sum = 0.0;
            for (a, b) in prev.iter().zip(cur) {
                let d = b - a;
                if d != 0.0 {
                    changed += 1;
                }
                abs_sum += d.abs();
                sq_sum += d * d;
            }
            if conv.change_count == ChangeCount::AllKnown {
                changed += 1;
            }
            let big_n = match conv.divisor {
                Divisor::PostDiscovery => n,
                Divisor::PreDiscovery => n - 1,
            } as f64;
            StepContribution {
                step: n,
                r: changed as f64 / big_n,
                omega: abs_sum / (big_n * big_n / conv.normalization.omega),
                chi: sq_sum / (big_n * big_n * big_n / conv.normalization.chi),
            }
        })
        .collect()
}

/// `(δ_r, δ_ω, δ_χ)` over a rank history; zero when there are fewer than two steps.
pub fn deltas_from_history(history: &[RankVector], conv: &MeasureConventions) -> (f64, f64, f64) {
    step_contributions(history, conv)
        .iter()
        .fold((0.0, 0.0, 0.0), |(r, w, c), s| {
            (r + s.r, w + s.omega, c + s.chi)
        })
}

fn history(trace: &DiscoveryTrace) -> Vec<RankVector> {
    trace.snapshots.iter().map(|s| s.ranks.clone()).collect()
}

pub fn delta_r(trace: &DiscoveryTrace, conv: &MeasureConventions) -> f64 {
    deltas_from_history(&history(trace), conv).0
}

pub fn delta_omega(trace: &DiscoveryTrace, conv: &MeasureConventions) -> f64 {
    deltas_from_history(&history(trace), conv).1
}

pub fn delta_chi(trace: &DiscoveryTrace, conv: &MeasureConventions) -> f64 {
    deltas_from_history(&history(trace), conv).2
}

/// The whole-process measures for one discovery run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InnovationAggregates {
    pub delta_r: f64,
    pub delta_omega: f64,
    pub delta_chi: f64,
    pub unused_symbols: usize,
}

pub fn aggregate(
    trace: &DiscoveryTrace,
    world: &World,
    conv: &MeasureConventions,
) -> InnovationAggregates {
    let (delta_r, delta_omega, delta_chi) = deltas_from_history(&history(trace), conv);
    let unused_symbols = match world {
        World::Real(d) => unused_symbol_count(d),
        World::Null(_) => 0,
    };
    InnovationAggregates {
        delta_r,
        delta_omega,
        delta_chi,
        unused_symbols,
    }
}

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn symbol_entropy(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    // -0.0 for a point mass
    h.max(0.0)
}

/// Change of the mean usefulness (and of mean + SEM) from the previous step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrequencyChange {
    pub delta_mean: Option<f64>,
    pub delta_mean_plus_sem: Option<f64>,
}

/// One entry per step. Step 1 and any step where this or the previous
/// step's statistics are undefined yield `None`.
pub fn frequency_change_series(trace: &DiscoveryTrace) -> Vec<FrequencyChange> {
    let stats: Vec<Option<(f64, f64)>> = trace
        .snapshots
        .iter()
        .map(|s| match (s.mean_freq, s.sd_freq) {
            (Some(m), Some(sd)) => Some((m, m + sd / (s.known_count as f64).sqrt())),
            _ => None,
        })
        .collect();
    let mut out = Vec::with_capacity(stats.len());
    for (k, cur) in stats.iter().enumerate() {
        let prev = if k == 0 { None } else { stats[k - 1] };
        out.push(match (prev, cur) {
            (Some((m0, h0)), Some((m1, h1))) => FrequencyChange {
                delta_mean: Some(m1 - m0),
                delta_mean_plus_sem: Some(h1 - h0),
            },
            _ => FrequencyChange::default(),
        });
    }
    out
}

/// `log10(1 + |x|)`, the plotting transform for frequency changes.
pub fn log10_one_plus_abs(x: f64) -> f64 {
    (1.0 + x.abs()).log10()
}

/// At every step, the mean of each known symbol's ranks since its
/// discovery, re-ranked with tie averaging (lowest mean gets rank 1).
pub fn averaged_rank_trajectories(trace: &DiscoveryTrace) -> Vec<RankVector> {
    let mut sums: Vec<f64> = Vec::with_capacity(trace.snapshots.len());
    let mut out = Vec::with_capacity(trace.snapshots.len());
    for (k, snap) in trace.snapshots.iter().enumerate() {
        sums.push(0.0);
        for (sum, r) in sums.iter_mut().zip(snap.ranks.as_slice()) {
            *sum += r;
        }
        let n = k + 1;
        let means: Vec<f64> = sums
            .iter()
            .enumerate()
            .map(|(j, s)| s / (n - j) as f64)
            .collect();
        out.push(rank_ascending(&means));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::{DiscoveryOrder, StepSnapshot, Strategy};
    use crate::model::SymbolId;

    fn rv(v: &[f64]) -> RankVector {
        RankVector(v.to_vec())
    }

    fn trace_from_ranks(ranks: &[&[f64]]) -> DiscoveryTrace {
        let snapshots = ranks
            .iter()
            .enumerate()
            .map(|(k, r)| StepSnapshot {
                step: k + 1,
                discovered: SymbolId(k as u32),
                known_count: k + 1,
                knowable_count: 0,
                usefulness: vec![0; k + 1],
                ranks: rv(r),
                entropy: None,
                mean_freq: None,
                sd_freq: None,
                fraction_discovered: 0.0,
            })
            .collect();
        DiscoveryTrace {
            provenance: Default::default(),
            order: DiscoveryOrder {
                sequence: (0..ranks.len() as u32).map(SymbolId).collect(),
                strategy: Strategy::Random,
                seed: 0,
            },
            symbol_count: ranks.len(),
            word_count: 0,
            snapshots,
        }
    }

    #[test]
    fn tie_averaging_examples() {
        assert_eq!(
            rank_with_tie_averaging(&[9, 8, 5, 5]).0,
            vec![1.0, 2.0, 3.5, 3.5]
        );
        assert_eq!(rank_with_tie_averaging(&[4, 4, 4]).0, vec![2.0, 2.0, 2.0]);
        assert_eq!(rank_with_tie_averaging(&[3, 2, 1]).0, vec![1.0, 2.0, 3.0]);
        assert_eq!(rank_with_tie_averaging(&[1, 3, 2]).0, vec![3.0, 1.0, 2.0]);
        assert_eq!(rank_ascending(&[2.0, 1.0, 2.0]).0, vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn hand_trace() {
        let t = trace_from_ranks(&[&[1.0], &[1.0, 2.0], &[2.0, 1.0, 3.0]]);
        let c = MeasureConventions::default();
        assert!((delta_r(&t, &c) - 2.0 / 3.0).abs() < 1e-15);
        assert!((delta_omega(&t, &c) - 4.0 / 9.0).abs() < 1e-15);
        assert!((delta_chi(&t, &c) - 8.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn static_ranks_give_zero() {
        let t = trace_from_ranks(&[&[1.0], &[1.0, 2.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]]);
        let c = MeasureConventions::default();
        assert_eq!(deltas_from_history(&history(&t), &c), (0.0, 0.0, 0.0));
    }

    #[test]
    fn all_known_counts_new_symbol() {
        let t = trace_from_ranks(&[&[1.0], &[1.0, 2.0], &[1.0, 2.0, 3.0]]);
        let c = MeasureConventions {
            change_count: ChangeCount::AllKnown,
            ..Default::default()
        };
        assert!((delta_r(&t, &c) - (1.0 / 2.0 + 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(delta_omega(&t, &c), 0.0);
    }

    #[test]
    fn previously_known_churn_sum() {
        // Every old symbol changes each step: Σ (n−1)/n.
        let t = trace_from_ranks(&[&[1.0], &[2.0, 1.0], &[1.0, 3.0, 2.0], &[2.0, 1.0, 4.0, 3.0]]);
        let expected: f64 = (2..=4).map(|n| (n - 1) as f64 / n as f64).sum();
        assert!((delta_r(&t, &MeasureConventions::default()) - expected).abs() < 1e-15);
    }

    #[test]
    fn short_traces_are_zero() {
        let t = trace_from_ranks(&[&[1.0]]);
        assert_eq!(delta_r(&t, &MeasureConventions::default()), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(symbol_entropy(&[1.0]), 0.0);
        assert_eq!(symbol_entropy(&[1.0 / 32.0; 32]), 5.0);
        assert_eq!(symbol_entropy(&[0.5, 0.25, 0.25]), 1.5);
        assert_eq!(symbol_entropy(&[0.5, 0.0, 0.5]), 1.0);
    }

    #[test]
    fn averaged_ranks_examples() {
        let t = trace_from_ranks(&[&[1.0], &[1.0, 2.0], &[1.0, 2.0, 3.0]]);
        let a = averaged_rank_trajectories(&t);
        assert!(a.iter().all(|r| r.0[0] == 1.0));

        let t = trace_from_ranks(&[&[1.0], &[2.0, 1.0], &[2.0, 3.0, 1.0]]);
        let a = averaged_rank_trajectories(&t);
        assert_eq!(a[2].0, vec![2.0, 3.0, 1.0]);
        // symbol 0 averages 1.5 over two steps, symbol 1 has only ever been 1
        assert_eq!(a[1].0, vec![2.0, 1.0]);
    }

    #[test]
    fn log_transform() {
        assert_eq!(log10_one_plus_abs(0.0), 0.0);
        assert_eq!(log10_one_plus_abs(10.0 - 2.0), 9f64.log10());
        assert_eq!(log10_one_plus_abs(-8.0), 9f64.log10());
    }
}
