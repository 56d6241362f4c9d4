//! Row-scale invariance (Condition 1) by randomized search with exact confirmation.

use num::rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::confusion::{apply_scaling, row_gcd, ConfusionMatrix, RowScaling};
use crate::index::IndexId;
use crate::VALUE_TOLERANCE;

pub const DEFAULT_SEED: u64 = 0x5eed_1dea;

#[derive(Debug, Clone)]
pub struct Condition1Config {
    pub trials: usize,
    pub seed: u64,
    /// Fixed class count; `None` draws `C` per trial (2 for two-class indices).
    pub class_count: Option<usize>,
    /// Resampling attempts per trial when the index is undefined on a draw.
    pub max_attempts: usize,
}

impl Default for Condition1Config {
    fn default() -> Self {
        Self {
            trials: 500,
            seed: DEFAULT_SEED,
            class_count: None,
            max_attempts: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition1Verdict {
    Invariant,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition1Witness {
    pub trial: usize,
    pub matrix: ConfusionMatrix,
    pub scaling: RowScaling,
    pub scaled: ConfusionMatrix,
    pub original_value: f64,
    pub scaled_value: f64,
    pub original_exact: String,
    pub scaled_exact: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition1Outcome {
    pub verdict: Condition1Verdict,
    pub trials: usize,
    pub seed: u64,
    pub class_count: Option<usize>,
    /// Draws discarded because the index was undefined on them.
    pub resampled: usize,
    /// Trials that never produced a defined pair within `max_attempts`.
    pub skipped_trials: usize,
    /// Pairs equal in exact arithmetic but further apart than the float tolerance.
    pub float_drift: usize,
    pub witness: Option<Condition1Witness>,
}

enum Trial {
    Agree { resampled: usize, drift: bool },
    Disagree { resampled: usize, witness: Box<Condition1Witness> },
    Skipped { resampled: usize },
}

/// Scale factors tried by the sampler: every `p/q` with `1 <= p, q <= 5`.
fn candidate_factors() -> Vec<Ratio<u64>> {
    let mut out: Vec<Ratio<u64>> = (1..=5u64)
        .flat_map(|p| (1..=5u64).map(move |q| Ratio::new(p, q)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The RNG stream for one trial: ChaCha8 seeded with `seed`, stream `stream`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform composition of `total` into `parts` non-negative integers.
pub(crate) fn random_composition<R: Rng>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    let slots = total as usize + parts - 1;
    let mut bars = sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0usize;
    for b in bars {
        out.push((b - prev) as u64);
        prev = b + 1;
    }
    out.push((slots - prev) as u64);
    out
}

/// A random valid matrix with row sums uniform in `[5, 50]`.
pub fn sample_matrix<R: Rng>(rng: &mut R, classes: usize) -> ConfusionMatrix {
    let mut counts = Vec::with_capacity(classes * classes);
    for _ in 0..classes {
        let n = rng.random_range(5..=50u64);
        counts.extend(random_composition(rng, n, classes));
    }
    ConfusionMatrix::from_flat(classes, counts).expect("row sums are positive")
}

/// A random non-constant integrality-preserving scaling for `m`.
pub fn sample_scaling<R: Rng>(rng: &mut R, m: &ConfusionMatrix) -> RowScaling {
    let candidates = candidate_factors();
    let admissible: Vec<Vec<Ratio<u64>>> = (0..m.class_count())
        .map(|i| {
            let g = row_gcd(m.row(i));
            candidates.iter().copied().filter(|f| g.is_multiple_of(*f.denom())).collect()
        })
        .collect();
    loop {
        let factors: Vec<Ratio<u64>> = admissible
            .iter()
            .map(|a| a[rng.random_range(0..a.len())])
            .collect();
        if factors.iter().any(|f| *f != factors[0]) {
            return RowScaling::new(factors).expect("positive factors");
        }
    }
}

fn run_trial(index: IndexId, cfg: &Condition1Config, trial: usize) -> Trial {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let mut resampled = 0;
    for _ in 0..cfg.max_attempts {
        let classes = match cfg.class_count {
            _ if index.is_binary() => 2,
            Some(c) => c,
            None => rng.random_range(2..=6),
        };
        let m = sample_matrix(&mut rng, classes);
        let scaling = sample_scaling(&mut rng, &m);
        let scaled = apply_scaling(&m, &scaling).expect("scaling sampled for this matrix");
        let (Ok(a), Ok(b)) = (index.evaluate(&m), index.evaluate(&scaled)) else {
            unreachable!("class count matches index")
        };
        let (Some(a), Some(b)) = (a.value(), b.value()) else {
            resampled += 1;
            continue;
        };
        let exact_a = index.evaluate_exact(&m).expect("applicable");
        let exact_b = index.evaluate_exact(&scaled).expect("applicable");
        let (Ok(exact_a), Ok(exact_b)) = (exact_a, exact_b) else {
            resampled += 1;
            continue;
        };
        if exact_a == exact_b {
            return Trial::Agree {
                resampled,
                drift: (a - b).abs() > VALUE_TOLERANCE,
            };
        }
        return Trial::Disagree {
            resampled,
            witness: Box::new(Condition1Witness {
                trial,
                matrix: m,
                scaling,
                scaled,
                original_value: a,
                scaled_value: b,
                original_exact: exact_a.to_string(),
                scaled_exact: exact_b.to_string(),
            }),
        };
    }
    Trial::Skipped { resampled }
}

/// Searches for an equivalent pair of matrices on which `index` differs.
///
/// Trials run in parallel; each owns an RNG stream derived from `(seed, trial)`
/// and the reported witness is the one with the lowest trial number.
pub fn audit_condition1(index: IndexId, cfg: &Condition1Config) -> Condition1Outcome {
    let results: Vec<Trial> = (0..cfg.trials.max(1))
        .into_par_iter()
        .map(|t| run_trial(index, cfg, t))
        .collect();
    let mut outcome = Condition1Outcome {
        verdict: Condition1Verdict::Invariant,
        trials: results.len(),
        seed: cfg.seed,
        class_count: cfg.class_count,
        resampled: 0,
        skipped_trials: 0,
        float_drift: 0,
        witness: None,
    };
    for r in results {
        match r {
            Trial::Agree { resampled, drift } => {
                outcome.resampled += resampled;
                outcome.float_drift += usize::from(drift);
            }
            Trial::Skipped { resampled } => {
                outcome.resampled += resampled;
                outcome.skipped_trials += 1;
            }
            Trial::Disagree { resampled, witness } => {
                outcome.resampled += resampled;
                if outcome.witness.is_none() {
                    outcome.verdict = Condition1Verdict::Violated;
                    outcome.witness = Some(*witness);
                }
            }
        }
    }
    outcome
}

/// Re-evaluates a stored witness: true when the two matrices are equivalent
/// yet the index differs on them in exact arithmetic.
pub fn witness_holds(index: IndexId, w: &Condition1Witness) -> bool {
    let equivalent = crate::confusion::are_equivalent(&w.matrix, &w.scaled).unwrap_or(false);
    let a = index.evaluate_exact(&w.matrix);
    let b = index.evaluate_exact(&w.scaled);
    match (a, b) {
        (Ok(Ok(a)), Ok(Ok(b))) => equivalent && a != b,
        _ => false,
    }
}
