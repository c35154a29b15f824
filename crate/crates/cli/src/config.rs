//! Experiment configuration files.
//!
//! A configuration is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! experiment = "rate_vs_mt"
//! seed = 7
//! trials = 20000
//!
//! [params]            # overrides of the baseline network
//! lambda_t = 300.0    # densities in 1/km²
//! coop_radius_d = 100.0
//!
//! [[sweep]]
//! name = "m_t"
//! values = [2, 3, 4, 5, 6]
//!
//! [options]
//! mc_rate = true
//! ```
//!
//! Command-line flags override file values, which override the preset
//! shipped for the experiment.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use isac_core::boundary::PowerConstraint;
use isac_core::params::per_km2;
use isac_core::{PowerMode, SensingMode, SystemParams};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    GdopVsN,
    CrlbScaling,
    CrlbVsDensity,
    RateVsMt,
    AllocVsAlpha,
    Boundary,
    ValidateFormulas,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::GdopVsN,
        Experiment::CrlbScaling,
        Experiment::CrlbVsDensity,
        Experiment::RateVsMt,
        Experiment::AllocVsAlpha,
        Experiment::Boundary,
        Experiment::ValidateFormulas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::GdopVsN => "gdop_vs_n",
            Experiment::CrlbScaling => "crlb_scaling",
            Experiment::CrlbVsDensity => "crlb_vs_density",
            Experiment::RateVsMt => "rate_vs_mt",
            Experiment::AllocVsAlpha => "alloc_vs_alpha",
            Experiment::Boundary => "boundary",
            Experiment::ValidateFormulas => "validate_formulas",
        }
    }

    /// The preset configuration shipped with the tool.
    pub fn preset(self) -> &'static str {
        match self {
            Experiment::GdopVsN => include_str!("../presets/gdop_vs_n.toml"),
            Experiment::CrlbScaling => include_str!("../presets/crlb_scaling.toml"),
            Experiment::CrlbVsDensity => include_str!("../presets/crlb_vs_density.toml"),
            Experiment::RateVsMt => include_str!("../presets/rate_vs_mt.toml"),
            Experiment::AllocVsAlpha => include_str!("../presets/alloc_vs_alpha.toml"),
            Experiment::Boundary => include_str!("../presets/boundary.toml"),
            Experiment::ValidateFormulas => include_str!("../presets/validate_formulas.toml"),
        }
    }

    /// Sweep axes the experiment understands, with whether values must be
    /// positive integers.
    pub fn axes(self) -> &'static [(&'static str, bool)] {
        match self {
            Experiment::GdopVsN | Experiment::CrlbScaling => &[("n", true)],
            Experiment::CrlbVsDensity => &[("m_t", true)],
            Experiment::RateVsMt => &[("m_t", true), ("coop_radius_d", false)],
            Experiment::AllocVsAlpha => &[("alpha", false), ("m_t", true)],
            Experiment::Boundary => &[("m_t", true), ("p_c", false)],
            Experiment::ValidateFormulas => &[],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Overrides of [`SystemParams::baseline`]. Densities are per km².
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub lambda_t: Option<f64>,
    pub lambda_r: Option<f64>,
    pub lambda_b: Option<f64>,
    pub m_t: Option<u32>,
    pub m_r: Option<u32>,
    pub coop_radius_d: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p_c: Option<f64>,
    pub p_s: Option<f64>,
    pub rcs_sigma: Option<f64>,
    pub gamma_0: Option<f64>,
    pub noise_sigma_s2: Option<f64>,
    pub bandwidth_b: Option<f64>,
    pub g_t: Option<f64>,
    pub power_mode: Option<PowerMode>,
}

impl ParamOverrides {
    /// Baseline with the overrides applied. Unless `lambda_b` is given it
    /// follows `lambda_t / m_t`; unless `p_s` is given it is `1 − p_c`.
    pub fn resolve(&self) -> SystemParams {
        let mut p = SystemParams::baseline();
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        set!(m_t, m_r, coop_radius_d, alpha, beta, rcs_sigma, gamma_0, noise_sigma_s2, bandwidth_b, g_t, power_mode);
        if let Some(v) = self.lambda_t {
            p.lambda_t = per_km2(v);
        }
        if let Some(v) = self.lambda_r {
            p.lambda_r = per_km2(v);
        }
        p.lambda_b = match self.lambda_b {
            Some(v) => per_km2(v),
            None => p.lambda_t / f64::from(p.m_t.max(1)),
        };
        if let Some(v) = self.p_c {
            p.p_c = v;
            p.p_s = 1.0 - v;
        }
        if let Some(v) = self.p_s {
            p.p_s = v;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrlbMethodName {
    #[default]
    ClosedForm,
    MonteCarlo,
}

/// Experiment-specific switches; each experiment documents the ones it
/// reads.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub modes: Option<Vec<SensingMode>>,
    pub power_constraints: Option<Vec<PowerConstraint>>,
    pub crlb_method: Option<CrlbMethodName>,
    pub prune: Option<bool>,
    /// Lower limit of the allocation integral; defaults to
    /// `10⁻³ π λ_t D²`.
    pub epsilon: Option<f64>,
    pub mc_rate: Option<bool>,
    /// Multiplies every validation tolerance.
    pub tolerance_scale: Option<f64>,
    /// Rate level, bits, at which frontier CRLBs are compared.
    pub report_rate_bits: Option<f64>,
    pub gnuplot: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub options: Options,
}

fn default_trials() -> u64 {
    10_000
}

/// A problem with a configuration, tied to the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl ExperimentConfig {
    /// Parses a TOML document. Syntax and type errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self, Vec<ConfigIssue>> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            vec![ConfigIssue {
                field: "<document>".into(),
                message: e.to_string().trim_end().to_string(),
            }]
        })?;
        let issues = config.validate();
        if issues.is_empty() {
            Ok(config)
        } else {
            Err(issues)
        }
    }

    pub fn preset(experiment: Experiment) -> Self {
        Self::from_toml(experiment.preset()).expect("presets are valid")
    }

    pub fn system_params(&self) -> SystemParams {
        self.params.resolve()
    }

    /// Values of a sweep axis, if configured.
    pub fn axis(&self, name: &str) -> Option<&[f64]> {
        self.sweep.iter().find(|a| a.name == name).map(|a| a.values.as_slice())
    }

    /// Integer values of a sweep axis, or `default`.
    pub fn int_axis(&self, name: &str, default: impl FnOnce() -> Vec<u32>) -> Vec<u32> {
        self.axis(name)
            .map(|v| v.iter().map(|&x| x as u32).collect())
            .unwrap_or_else(default)
    }

    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let mut issue = |field: &str, message: String| {
            issues.push(ConfigIssue {
                field: field.to_string(),
                message,
            })
        };
        if self.schema_version != SCHEMA_VERSION {
            issue(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            );
        }
        if self.trials == 0 && self.experiment != Experiment::AllocVsAlpha {
            issue("trials", "must be at least 1".into());
        }
        let allowed = self.experiment.axes();
        for (k, axis) in self.sweep.iter().enumerate() {
            let field = format!("sweep[{k}]");
            let Some(&(_, integral)) = allowed.iter().find(|(n, _)| *n == axis.name) else {
                let names: Vec<&str> = allowed.iter().map(|a| a.0).collect();
                issue(
                    &format!("{field}.name"),
                    format!("unknown axis '{}' for {} (allowed: {names:?})", axis.name, self.experiment),
                );
                continue;
            };
            if self.sweep[..k].iter().any(|a| a.name == axis.name) {
                issue(&format!("{field}.name"), format!("axis '{}' given twice", axis.name));
            }
            if axis.values.is_empty() {
                issue(&format!("{field}.values"), "must not be empty".into());
            }
            for (j, &v) in axis.values.iter().enumerate() {
                let bad = !v.is_finite() || (integral && (v < 1.0 || v.fract() != 0.0 || v > f64::from(u32::MAX)));
                if bad {
                    let kind = if integral { "a positive integer" } else { "finite" };
                    issue(&format!("{field}.values[{j}]"), format!("{v} must be {kind}"));
                }
            }
            if axis.name == "p_c" && axis.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                issue(&format!("{field}.values"), "p_c values must lie in [0, 1]".into());
            }
            if axis.name == "alpha" && axis.values.iter().any(|&v| v <= 2.0) {
                issue(&format!("{field}.values"), "alpha values must exceed 2".into());
            }
        }
        let p = self.system_params();
        for v in p.validate() {
            let fields = v.fields.iter().map(|f| format!("params.{f}")).collect::<Vec<_>>().join(", ");
            issue(&fields, v.message);
        }
        if let Some(modes) = &self.options.modes {
            if modes.is_empty() {
                issue("options.modes", "must not be empty".into());
            }
            let crlb_experiment = matches!(
                self.experiment,
                Experiment::CrlbScaling | Experiment::CrlbVsDensity | Experiment::Boundary
            );
            if crlb_experiment && modes.contains(&SensingMode::AoaOriented) {
                issue("options.modes", "aoa_oriented has no CRLB; use it with gdop_vs_n".into());
            }
        }
        if let Some(s) = self.options.tolerance_scale {
            if !(s > 0.0 && s.is_finite()) {
                issue("options.tolerance_scale", "must be positive".into());
            }
        }
        if let Some(e) = self.options.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                issue("options.epsilon", "must be positive".into());
            }
        }
        issues
    }

    /// The configuration with the output location removed, hashed for the
    /// run manifest.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        serde_json::to_string(&c).expect("config serializes")
    }
}
