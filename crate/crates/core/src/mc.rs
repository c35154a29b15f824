//! Parallel Monte Carlo driver with schedule-independent results.
//!
//! Trials are grouped into fixed-size chunks. Each chunk is reduced
//! sequentially, then the chunk summaries are merged pairwise along a fixed
//! tree. Because neither the chunk boundaries nor the tree depend on the
//! thread count, the estimate is bit-for-bit identical for any pool size.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::substream;

const CHUNK: u64 = 2048;

/// A Monte Carlo estimate of a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
    /// Number of samples that entered the mean.
    pub trials: u64,
    pub seed: u64,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trial {
    /// A regular sample.
    Value(f64),
    /// A sample that enters the mean but is also counted, e.g. a rate trial
    /// with no serving base station.
    Flagged(f64),
    /// A trial left out of the mean, e.g. a singular Fisher matrix.
    Excluded,
}

/// Running moments plus outcome counters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub flagged: u64,
    pub excluded: u64,
}

impl Tally {
    pub fn push(&mut self, trial: Trial) {
        let x = match trial {
            Trial::Value(x) => x,
            Trial::Flagged(x) => {
                self.flagged += 1;
                x
            }
            Trial::Excluded => {
                self.excluded += 1;
                return;
            }
        };
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. parallel merge.
    pub fn merge(&self, other: &Tally) -> Tally {
        let n = self.count + other.count;
        let (mean, m2) = if n == 0 {
            (0.0, 0.0)
        } else if self.count == 0 {
            (other.mean, other.m2)
        } else if other.count == 0 {
            (self.mean, self.m2)
        } else {
            let (na, nb) = (self.count as f64, other.count as f64);
            let delta = other.mean - self.mean;
            let nn = n as f64;
            (
                self.mean + delta * nb / nn,
                self.m2 + other.m2 + delta * delta * na * nb / nn,
            )
        };
        Tally {
            count: n,
            mean,
            m2,
            flagged: self.flagged + other.flagged,
            excluded: self.excluded + other.excluded,
        }
    }

    /// Total number of trials seen, including excluded ones.
    pub fn total(&self) -> u64 {
        self.count + self.excluded
    }

    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            let n = self.count as f64;
            (self.m2 / (n - 1.0)).max(0.0).sqrt() / n.sqrt()
        }
    }

    /// The estimate, or `None` when no trial entered the mean.
    pub fn estimate(&self, seed: u64) -> Option<McEstimate> {
        (self.count > 0).then(|| McEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            trials: self.count,
            seed,
        })
    }
}

fn merge_tree(parts: &[Tally]) -> Tally {
    match parts.len() {
        0 => Tally::default(),
        1 => parts[0],
        n => {
            let (l, r) = parts.split_at(n / 2);
            merge_tree(l).merge(&merge_tree(r))
        }
    }
}

/// Runs `trials` independent trials; trial `t` receives stream `t` of `seed`.
pub fn run_trials<F>(trials: u64, seed: u64, f: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng) -> Trial + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::default();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut rng = substream(seed, t);
                tally.push(f(&mut rng));
            }
            tally
        })
        .collect();
    merge_tree(&parts)
}

/// Like [`run_trials`] for `dim` statistics computed from the same trial.
/// `f` writes one outcome per statistic into its output slice.
pub fn run_trials_multi<F>(trials: u64, seed: u64, dim: usize, f: F) -> Vec<Tally>
where
    F: Fn(&mut ChaCha8Rng, &mut [Trial]) + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Vec<Tally>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tallies = vec![Tally::default(); dim];
            let mut out = vec![Trial::Excluded; dim];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut rng = substream(seed, t);
                f(&mut rng, &mut out);
                for (tally, trial) in tallies.iter_mut().zip(&out) {
                    tally.push(*trial);
                }
            }
            tallies
        })
        .collect();
    (0..dim)
        .map(|k| merge_tree(&parts.iter().map(|p| p[k]).collect::<Vec<_>>()))
        .collect()
}
