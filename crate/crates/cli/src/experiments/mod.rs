//! The named experiments.

mod allocation;
mod boundary;
mod sensing;

use isac_core::rng::derive_seed;
use isac_core::{Result, SensingMode};

use crate::config::{Experiment, ExperimentConfig};
use crate::Outputs;

pub fn run(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    match config.experiment {
        Experiment::GdopVsN => sensing::gdop_vs_n(config, out),
        Experiment::CrlbScaling => sensing::crlb_scaling(config, out),
        Experiment::CrlbVsDensity => sensing::crlb_vs_density(config, out),
        Experiment::RateVsMt => allocation::rate_vs_mt(config, out),
        Experiment::AllocVsAlpha => allocation::alloc_vs_alpha(config, out),
        Experiment::Boundary => boundary::boundary(config, out),
        Experiment::ValidateFormulas => crate::validate::validate_formulas(config, out),
    }
}

fn modes(config: &ExperimentConfig, default: &[SensingMode]) -> Vec<SensingMode> {
    config.options.modes.clone().unwrap_or_else(|| default.to_vec())
}

/// Seed of one sweep cell, independent of the order of the sweep values.
fn cell_seed(config: &ExperimentConfig, mode: SensingMode, key: u64) -> u64 {
    let tag = match mode {
        SensingMode::Aoa => 0,
        SensingMode::Tof => 1,
        SensingMode::Hybrid => 2,
        SensingMode::AoaOriented => 3,
    };
    derive_seed(config.seed, key * 8 + tag)
}

fn rel_error(prediction: f64, reference: f64) -> f64 {
    (prediction - reference).abs() / reference.abs()
}
