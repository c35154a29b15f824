use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{fim, gdop_matrix, trace_inverse, SensingMode};
use crate::error::{Error, Result};
use crate::geometry::{DeploymentSpec, NetworkRealization};
use crate::mc::{run_trials, McEstimate, Tally, Trial};
use crate::params::SystemParams;

/// Monte Carlo mean of `tr(F⁻¹)` over localizable trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrlbEstimate {
    /// `None` when every trial was singular.
    pub estimate: Option<McEstimate>,
    pub total_trials: u64,
    /// Trials with a singular matrix or an empty cluster.
    pub singular_trials: u64,
}

impl CrlbEstimate {
    fn from_tally(t: &Tally, seed: u64) -> Self {
        Self {
            estimate: t.estimate(seed),
            total_trials: t.total(),
            singular_trials: t.excluded,
        }
    }

    pub fn singular_fraction(&self) -> f64 {
        self.singular_trials as f64 / self.total_trials.max(1) as f64
    }

    /// Mean, or `NaN` when undefined.
    pub fn mean(&self) -> f64 {
        self.estimate.map_or(f64::NAN, |e| e.mean)
    }

    pub fn std_error(&self) -> f64 {
        self.estimate.map_or(f64::NAN, |e| e.std_error)
    }

    /// The estimate, or an error when every trial was singular.
    pub fn require(&self) -> Result<McEstimate> {
        self.estimate.ok_or(Error::AllSingular {
            trials: self.total_trials,
        })
    }
}

fn sample_trial(value: f64) -> Trial {
    if value.is_finite() {
        Trial::Value(value)
    } else {
        Trial::Excluded
    }
}

/// Expected CRLB `E[tr(F⁻¹)]` over deployments drawn from `spec`.
///
/// Singular trials (including empty clusters) are left out of the mean and
/// counted in [`CrlbEstimate::singular_trials`].
pub fn mc_expected_crlb(
    mode: SensingMode,
    spec: &DeploymentSpec,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<CrlbEstimate> {
    if mode == SensingMode::AoaOriented {
        return Err(Error::InvalidParams("aoa_oriented applies only to GDoP matrices".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    spec.validate()?;
    let tally = run_trials(trials, seed, |rng| {
        let r = spec.sample(rng);
        if r.is_empty() {
            return Trial::Excluded;
        }
        sample_trial(trace_inverse(&fim(mode, &r, params)))
    });
    Ok(CrlbEstimate::from_tally(&tally, seed))
}

/// Expected GDoP `E[tr(F̃⁻¹)]` for `n` stations with uniform bearings.
pub fn mc_expected_gdop(mode: SensingMode, n: usize, trials: u64, seed: u64) -> Result<CrlbEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParams("n and trials must be at least 1".into()));
    }
    let tally = run_trials(trials, seed, |rng| {
        let bearings: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        sample_trial(trace_inverse(&gdop_matrix(mode, &NetworkRealization::unit(bearings))))
    });
    Ok(CrlbEstimate::from_tally(&tally, seed))
}
