//! Hypothetical error adjustment of measurement outcomes.
//!
//! Each trial re-runs the shot record: a shot is erroneous with probability
//! `p_err` (batched per outcome as a binomial draw), clean shots keep their
//! bitstring and erroneous ones move to a uniformly chosen different bitstring.
//! Trial `t` draws from ChaCha stream `t` of the seed, so results do not depend
//! on how trials are spread over threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{format_bitstring, Counts, SimError};

pub const DEFAULT_TRIALS: usize = 10_000;
/// Every one of the `2^n_bits` bitstrings is reported, so the width is bounded.
pub const MAX_ADJUST_BITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStats {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedOutcomes {
    pub trials: usize,
    pub shots: u64,
    pub p_err: f64,
    pub outcomes: BTreeMap<String, OutcomeStats>,
    /// Per-bitstring adjusted count for every trial, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<BTreeMap<String, Vec<u32>>>,
}

impl AdjustedOutcomes {
    pub fn get(&self, bitstring: &str) -> Option<&OutcomeStats> {
        self.outcomes.get(bitstring)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AdjustOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub keep_raw: bool,
}

/// Closed-interval overlap of two 95% intervals.
pub fn ci_overlap(a: &OutcomeStats, b: &OutcomeStats) -> bool {
    a.ci_low.max(b.ci_low) <= a.ci_high.min(b.ci_high)
}

pub fn adjust_counts(
    ideal: &Counts,
    p_err: f64,
    n_bits: usize,
    trials: usize,
    seed: u64,
) -> Result<AdjustedOutcomes, SimError> {
    adjust_counts_with(ideal, p_err, n_bits, trials, seed, &AdjustOptions::default())
}

pub fn adjust_counts_with(
    ideal: &Counts,
    p_err: f64,
    n_bits: usize,
    trials: usize,
    seed: u64,
    options: &AdjustOptions,
) -> Result<AdjustedOutcomes, SimError> {
    if !(0.0..=1.0).contains(&p_err) {
        return Err(SimError::ProbabilityOutOfRange(p_err));
    }
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if n_bits == 0 || n_bits > MAX_ADJUST_BITS {
        return Err(SimError::BitWidth {
            n_bits,
            max: MAX_ADJUST_BITS,
        });
    }
    let mut ideal_idx: Vec<(usize, u64)> = Vec::with_capacity(ideal.counts.len());
    for (key, &count) in &ideal.counts {
        if key.len() != n_bits || !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(SimError::BitstringMismatch {
                key: key.clone(),
                n_bits,
            });
        }
        if count > 0 {
            ideal_idx.push((usize::from_str_radix(key, 2).expect("checked binary"), count));
        }
    }
    let shots: u64 = ideal.counts.values().sum();
    if shots > u64::from(u32::MAX) {
        return Err(SimError::TooManyShots(shots));
    }
    let space = 1usize << n_bits;

    let run = || -> Vec<Vec<u32>> {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(&ideal_idx, p_err, space, seed, t as u64))
            .collect()
    };
    let per_trial = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SimError::ThreadPool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut outcomes = BTreeMap::new();
    let mut raw = options.keep_raw.then(BTreeMap::new);
    let mut column = vec![0u32; trials];
    for value in 0..space {
        for (slot, trial) in column.iter_mut().zip(&per_trial) {
            *slot = trial[value];
        }
        let key = format_bitstring(value, n_bits);
        if let Some(raw) = raw.as_mut() {
            raw.insert(key.clone(), column.clone());
        }
        outcomes.insert(key, summarize(&mut column));
    }

    Ok(AdjustedOutcomes {
        trials,
        shots,
        p_err,
        outcomes,
        raw,
    })
}

fn run_trial(ideal: &[(usize, u64)], p_err: f64, space: usize, seed: u64, trial: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut totals = vec![0u32; space];
    for &(value, count) in ideal {
        let erred = Binomial::new(count, p_err)
            .expect("p_err validated")
            .sample(&mut rng);
        totals[value] += (count - erred) as u32;
        for _ in 0..erred {
            let r = rng.random_range(0..space - 1);
            let dest = if r >= value { r + 1 } else { r };
            totals[dest] += 1;
        }
    }
    totals
}

/// Mean and nearest-rank 95% interval of one bitstring's per-trial counts.
///
/// Sorts `values` in place. The interval is widened to contain the mean when
/// a heavily skewed sample would otherwise leave it outside.
pub fn summarize(values: &mut [u32]) -> OutcomeStats {
    let n = values.len();
    let mean = values.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
    values.sort_unstable();
    let last = (n - 1) as f64;
    let lo = values[(0.025 * last).floor() as usize];
    let hi = values[(0.975 * last).ceil() as usize];
    OutcomeStats {
        mean,
        ci_low: f64::from(lo).min(mean),
        ci_high: f64::from(hi).max(mean),
    }
}
