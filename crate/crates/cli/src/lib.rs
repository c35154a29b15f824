//! Experiment driver for `isac-core`.
//!
//! Each experiment reads an [`ExperimentConfig`], writes one table per
//! sweep (CSV or JSON) and a [`RunManifest`] with checksums into the
//! output directory. Identical configuration and seed give byte-identical
//! tables for any thread count.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod validate;

use std::fs;
use std::io;
use std::path::Path;

use chrono::{SecondsFormat, Utc};

pub use config::{ConfigIssue, Experiment, ExperimentConfig, OutputFormat};
pub use manifest::{RunManifest, RunStatus};
pub use output::{Cell, Table};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ChecksFailed = 1,
    InvalidConfig = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Tables produced so far by an experiment.
#[derive(Debug, Default)]
pub struct Outputs {
    pub tables: Vec<Table>,
    /// Set by experiments that check tolerances.
    pub checks_failed: bool,
}

impl Outputs {
    /// Registers a table and returns its index for later row pushes.
    pub fn add(&mut self, table: Table) -> usize {
        self.tables.push(table);
        self.tables.len() - 1
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs `config` and writes its tables and `manifest.json` into `out_dir`.
///
/// A numerical failure still writes the tables produced before it, flagged
/// partial in the manifest.
pub fn run(config: &ExperimentConfig, out_dir: &Path, gnuplot: bool) -> io::Result<(RunManifest, ExitStatus)> {
    fs::create_dir_all(out_dir)?;
    let started_at = now();
    let mut outputs = Outputs::default();
    let result = experiments::run(config, &mut outputs);
    let mut records = Vec::new();
    for table in &outputs.tables {
        let name = output::file_name(table, config.format);
        let bytes = output::encode(table, config.format);
        output::write_file(out_dir, &name, &bytes)?;
        records.push(manifest::OutputRecord {
            file: name.clone(),
            sha256: manifest::sha256_hex(&bytes),
            rows: table.rows.len(),
            partial: result.is_err(),
        });
        if gnuplot && config.format == OutputFormat::Csv {
            if let Some(script) = output::gnuplot_script(table, &name) {
                output::write_file(out_dir, &format!("{}.gp", table.name), script.as_bytes())?;
            }
        }
    }
    let (status, error, exit) = match &result {
        Ok(()) if outputs.checks_failed => (RunStatus::ChecksFailed, None, ExitStatus::ChecksFailed),
        Ok(()) => (RunStatus::Ok, None, ExitStatus::Success),
        Err(e) => (RunStatus::NumericalFailure, Some(e.to_string()), ExitStatus::NumericalFailure),
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: config.schema_version,
        experiment: config.experiment.name().to_string(),
        config_hash: manifest::sha256_hex(config.canonical_json().as_bytes()),
        seed: config.seed,
        trials: config.trials,
        threads: rayon::current_num_threads(),
        started_at,
        finished_at: now(),
        status,
        error,
        outputs: records,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    output::write_file(out_dir, manifest::MANIFEST_FILE, format!("{text}\n").as_bytes())?;
    Ok((manifest, exit))
}
