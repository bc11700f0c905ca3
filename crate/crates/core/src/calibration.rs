//! Self-test calibrations: normalisation identities, hand-computed values,
//! rank-sum identities and brute-force recounts.

use serde::Serialize;

use crate::discovery::{order_random, run_discovery};
use crate::generators::{generate_dictionary, GeneratorParams, Model};
use crate::measures::{
    deltas_from_history, rank_with_tie_averaging, symbol_entropy, ChangeCount, Divisor,
    MeasureConventions, Normalization, RankVector,
};
use crate::model::{knowable_words, usefulness, Dictionary, SymbolId};

/// Rank history in which each of the `n − 1` previously known symbols moves
/// by `(n − 1)/2` at discovery `n`, alternating direction. Entries are
/// synthetic rank values, not a ranking.
pub fn idealized_churn_history(symbols: usize) -> Vec<RankVector> {
    let mut current: Vec<f64> = Vec::with_capacity(symbols);
    let mut out = Vec::with_capacity(symbols);
    for n in 1..=symbols {
        let shift = (n - 1) as f64 / 2.0;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for r in current.iter_mut() {
            *r += sign * shift;
        }
        current.push(n as f64);
        out.push(RankVector(current.clone()));
    }
    out
}

/// Ranks that never move: symbol `j` always holds rank `j + 1`.
pub fn static_history(symbols: usize) -> Vec<RankVector> {
    (1..=symbols)
        .map(|n| RankVector((1..=n).map(|r| r as f64).collect()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

/// Run every calibration with the given normalisation denominators.
pub fn run_calibrations(normalization: Normalization) -> Vec<Check> {
    let mut out = Vec::new();
    let pre = MeasureConventions {
        divisor: Divisor::PreDiscovery,
        change_count: ChangeCount::PreviouslyKnown,
        normalization,
    };
    let all_known = MeasureConventions {
        divisor: Divisor::PostDiscovery,
        change_count: ChangeCount::AllKnown,
        normalization,
    };
    let default = MeasureConventions {
        normalization,
        ..Default::default()
    };

    for s in [2usize, 8, 32] {
        let h = idealized_churn_history(s);
        let (r, w, c) = deltas_from_history(&h, &pre);
        let (r_all, _, _) = deltas_from_history(&h, &all_known);
        let target = (s - 1) as f64;
        out.push(check(
            format!("churn S={s}: delta_omega = delta_chi = S-1"),
            close(w, target) && close(c, target),
            format!("omega={w} chi={c} target={target}"),
        ));
        out.push(check(
            format!("churn S={s}: delta_r = S-1"),
            close(r, target) && close(r_all, target),
            format!("pre-divisor={r} all-known={r_all} target={target}"),
        ));
    }

    let (r, w, c) = deltas_from_history(&static_history(16), &default);
    out.push(check(
        "static ranks give zero",
        r == 0.0 && w == 0.0 && c == 0.0,
        format!("r={r} omega={w} chi={c}"),
    ));

    let hand = vec![
        RankVector(vec![1.0]),
        RankVector(vec![1.0, 2.0]),
        RankVector(vec![2.0, 1.0, 3.0]),
    ];
    let (r, w, c) = deltas_from_history(&hand, &default);
    out.push(check(
        "hand trace (2/3, 4/9, 8/27)",
        close(r, 2.0 / 3.0) && close(w, 4.0 / 9.0) && close(c, 8.0 / 27.0),
        format!("r={r} omega={w} chi={c}"),
    ));

    let ranks = rank_with_tie_averaging(&[9, 8, 5, 5]);
    out.push(check(
        "tie averaging [9,8,5,5]",
        ranks.0 == [1.0, 2.0, 3.5, 3.5],
        format!("{:?}", ranks.0),
    ));

    let h = symbol_entropy(&[1.0 / 32.0; 32]);
    out.push(check("uniform entropy over 32", h == 5.0, format!("{h}")));

    out.push(oracle_recount());
    out.push(rank_sum_identity());
    out
}

/// Brute-force per-word rescan against the incremental discovery bookkeeping.
fn oracle_recount() -> Check {
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for seed in 0..40u64 {
        let s = 2 + (seed % 7) as usize;
        let d = 1 + (seed * 13 % 64) as usize;
        let model = match seed % 4 {
            0 => Model::Fixed {
                word_length: 1 + (seed % 4) as usize,
            },
            1 => Model::Extensible,
            2 => Model::Chain {
                fork_probability: 0.3,
            },
            _ => Model::Blinkered {
                fork_probability: 0.5,
            },
        };
        let params = GeneratorParams::new(model, s, d, seed);
        let dict = match generate_dictionary(&params) {
            Ok(dict) => dict,
            Err(_) => continue,
        };
        let order = order_random(s, seed);
        let trace = match run_discovery(&dict, &order) {
            Ok(t) => t,
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        for snap in &trace.snapshots {
            let known = &order.sequence[..snap.known_count];
            compared += 1;
            let (w, u) = rescan(&dict, known);
            let state = knowable_words(&dict, known).expect("ids in range");
            let table = usefulness(&dict, &state);
            let table_ok = known.iter().zip(&u).all(|(s, &c)| table.get(*s) == Some(c));
            if w != snap.knowable_count || u != snap.usefulness || !table_ok {
                mismatches += 1;
            }
        }
    }
    check(
        "usefulness matches per-word rescan",
        mismatches == 0 && compared > 0,
        format!("{compared} states compared, {mismatches} mismatches"),
    )
}

fn rescan(dict: &Dictionary, known: &[SymbolId]) -> (usize, Vec<u64>) {
    let mut w = 0;
    let mut u = vec![0u64; known.len()];
    for word in dict.words() {
        if word.symbols().iter().all(|s| known.contains(s)) {
            w += 1;
            for (j, s) in known.iter().enumerate() {
                if word.symbols().contains(s) {
                    u[j] += 1;
                }
            }
        }
    }
    (w, u)
}

fn rank_sum_identity() -> Check {
    let params = GeneratorParams::new(
        Model::Chain {
            fork_probability: 0.1,
        },
        32,
        512,
        7,
    );
    let detail;
    let passed =
        match generate_dictionary(&params).and_then(|d| run_discovery(&d, &order_random(32, 3))) {
            Ok(trace) => {
                let bad = trace
                    .snapshots
                    .iter()
                    .filter(|s| s.ranks.sum() != (s.known_count * (s.known_count + 1)) as f64 / 2.0)
                    .count();
                detail = format!("{} steps, {bad} violations", trace.snapshots.len());
                bad == 0
            }
            Err(e) => {
                detail = e.to_string();
                false
            }
        };
    check("rank sums equal N(N+1)/2", passed, detail)
}
