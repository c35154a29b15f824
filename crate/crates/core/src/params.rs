//! System parameters, their validation, and the aggregate gain constants.
//!
//! All quantities are stored in SI units: distances in meters and densities
//! per square meter. Configuration files speak km⁻², so use [`per_km2`] and
//! [`to_per_km2`] at the boundary.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Tolerance used when comparing budgets that are equal by construction.
const BUDGET_RTOL: f64 = 1e-12;

/// Converts a density given per km² to per m².
pub fn per_km2(density: f64) -> f64 {
    density * 1e-6
}

/// Converts a density given per m² to per km².
pub fn to_per_km2(density: f64) -> f64 {
    density * 1e6
}

/// How the communication and sensing power fractions are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// `p_c + p_s = 1`.
    #[default]
    Strict,
    /// `p_c + p_s <= 1`, used when sweeping the power region.
    Sweep,
}

/// Every scalar constant of the network model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmit-antenna density, m⁻².
    pub lambda_t: f64,
    /// Receive-antenna density, m⁻².
    pub lambda_r: f64,
    /// Transmit antennas per base station.
    pub m_t: u32,
    /// Receive antennas per base station.
    pub m_r: u32,
    /// Base-station density, m⁻². Normally `lambda_t / m_t`.
    pub lambda_b: f64,
    /// Radius of the cooperation disk, m.
    pub coop_radius_d: f64,
    /// Communication pathloss exponent.
    pub alpha: f64,
    /// Sensing pathloss exponent.
    pub beta: f64,
    /// Communication power fraction.
    pub p_c: f64,
    /// Sensing power fraction.
    pub p_s: f64,
    /// Radar cross section, m².
    pub rcs_sigma: f64,
    /// Channel power at the 1 m reference distance.
    pub gamma_0: f64,
    /// Sensing noise power (linear).
    pub noise_sigma_s2: f64,
    /// Effective bandwidth, Hz.
    pub bandwidth_b: f64,
    /// Transmit beamforming gain.
    pub g_t: f64,
    /// Speed of light, m/s.
    pub speed_of_light_c: f64,
    pub power_mode: PowerMode,
}

impl SystemParams {
    /// Baseline network: 4 transmit and 10 receive antennas per station,
    /// 50 transmit antennas/km², α = 4, β = 2, an even power split, 10 MHz of
    /// bandwidth and a 1 km cooperation radius.
    ///
    /// The receive-antenna density is 125/km² so that ten receive antennas
    /// fit on each of the 12.5 stations/km². The radar cross section,
    /// reference gain and transmit beamforming gain are normalized to one.
    pub fn baseline() -> Self {
        let lambda_t = per_km2(50.0);
        Self {
            lambda_t,
            lambda_r: per_km2(125.0),
            m_t: 4,
            m_r: 10,
            lambda_b: lambda_t / 4.0,
            coop_radius_d: 1000.0,
            alpha: 4.0,
            beta: 2.0,
            p_c: 0.5,
            p_s: 0.5,
            rcs_sigma: 1.0,
            gamma_0: 1.0,
            noise_sigma_s2: 1e-10,
            bandwidth_b: 10e6,
            g_t: 1.0,
            speed_of_light_c: SPEED_OF_LIGHT,
            power_mode: PowerMode::Strict,
        }
    }

    /// Sets `m_t` and re-derives `lambda_b = lambda_t / m_t`.
    pub fn with_m_t(mut self, m_t: u32) -> Self {
        self.m_t = m_t;
        self.lambda_b = self.lambda_t / f64::from(m_t);
        self
    }

    /// Sets the communication share and gives the remainder to sensing.
    pub fn with_power_split(mut self, p_c: f64) -> Self {
        self.p_c = p_c;
        self.p_s = 1.0 - p_c;
        self
    }

    /// Expected number of base stations inside the cooperation disk.
    pub fn mean_cluster_size(&self) -> f64 {
        self.lambda_b * PI * self.coop_radius_d * self.coop_radius_d
    }

    /// Cluster size used by the fixed-N approximation, `round(λ_b π D²)`.
    pub fn fixed_cluster_size(&self) -> usize {
        self.mean_cluster_size().round() as usize
    }

    /// Shorthand for [`validate`].
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::baseline()
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Names of the offending fields.
    pub fields: Vec<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.message, self.fields.join(", "))
    }
}

fn violation(fields: &[&str], message: impl Into<String>) -> Violation {
    Violation {
        fields: fields.iter().map(|s| s.to_string()).collect(),
        message: message.into(),
    }
}

/// Checks every invariant of `params` and returns all violations.
///
/// Never panics: NaN and infinite inputs are reported like any other bad
/// value.
pub fn validate(params: &SystemParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let p = params;

    let finite: [(&str, f64); 14] = [
        ("lambda_t", p.lambda_t),
        ("lambda_r", p.lambda_r),
        ("lambda_b", p.lambda_b),
        ("coop_radius_d", p.coop_radius_d),
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("p_c", p.p_c),
        ("p_s", p.p_s),
        ("rcs_sigma", p.rcs_sigma),
        ("gamma_0", p.gamma_0),
        ("noise_sigma_s2", p.noise_sigma_s2),
        ("bandwidth_b", p.bandwidth_b),
        ("g_t", p.g_t),
        ("speed_of_light_c", p.speed_of_light_c),
    ];
    for (name, v) in finite {
        if !v.is_finite() {
            out.push(violation(&[name], format!("{name} is not finite")));
        }
    }

    for (name, v) in [
        ("lambda_t", p.lambda_t),
        ("lambda_r", p.lambda_r),
        ("lambda_b", p.lambda_b),
    ] {
        if v.is_finite() && v <= 0.0 {
            out.push(violation(&[name], format!("{name} <= 0")));
        }
    }
    for (name, v) in [
        ("coop_radius_d", p.coop_radius_d),
        ("noise_sigma_s2", p.noise_sigma_s2),
        ("bandwidth_b", p.bandwidth_b),
        ("speed_of_light_c", p.speed_of_light_c),
    ] {
        if v.is_finite() && v <= 0.0 {
            out.push(violation(&[name], format!("{name} <= 0")));
        }
    }
    for (name, v) in [
        ("rcs_sigma", p.rcs_sigma),
        ("gamma_0", p.gamma_0),
        ("g_t", p.g_t),
    ] {
        if v.is_finite() && v < 0.0 {
            out.push(violation(&[name], format!("{name} < 0")));
        }
    }

    if p.m_t == 0 {
        out.push(violation(&["m_t"], "m_t < 1"));
    }
    if p.m_r == 0 {
        out.push(violation(&["m_r"], "m_r < 1"));
    }
    if p.alpha.is_finite() && p.alpha < 2.0 {
        out.push(violation(&["alpha"], "alpha < 2"));
    }
    if p.beta.is_finite() && p.beta < 2.0 {
        out.push(violation(&["beta"], "beta < 2"));
    }

    for (name, v) in [("p_c", p.p_c), ("p_s", p.p_s)] {
        if v.is_finite() && !(0.0..=1.0).contains(&v) {
            out.push(violation(&[name], format!("{name} outside [0, 1]")));
        }
    }
    if p.p_c.is_finite() && p.p_s.is_finite() {
        let total = p.p_c + p.p_s;
        if total > 1.0 + BUDGET_RTOL {
            out.push(violation(&["p_c", "p_s"], "p_c + p_s > 1"));
        } else if p.power_mode == PowerMode::Strict && total < 1.0 - BUDGET_RTOL {
            out.push(violation(
                &["p_c", "p_s", "power_mode"],
                "p_c + p_s < 1 in strict power mode",
            ));
        }
    }

    if p.lambda_b.is_finite()
        && p.lambda_t.is_finite()
        && p.m_t > 0
        && p.lambda_b * f64::from(p.m_t) > p.lambda_t * (1.0 + BUDGET_RTOL)
    {
        out.push(violation(
            &["lambda_b", "m_t", "lambda_t"],
            "lambda_b * m_t > lambda_t",
        ));
    }
    if p.lambda_b.is_finite()
        && p.lambda_r.is_finite()
        && p.m_r > 0
        && p.lambda_b * f64::from(p.m_r) > p.lambda_r * (1.0 + BUDGET_RTOL)
    {
        out.push(violation(
            &["lambda_b", "m_r", "lambda_r"],
            "lambda_b * m_r > lambda_r",
        ));
    }

    out
}

fn common_sensing_gain(p: &SystemParams) -> f64 {
    p.rcs_sigma * p.p_s * p.gamma_0 / p.noise_sigma_s2
}

/// Angle-measurement gain `|ζ_a|² = π² M_r (M_r² − 1) G_t σ p_s γ_0 / (6 σ_s²)`.
pub fn zeta_a_sq(p: &SystemParams) -> f64 {
    let m_r = f64::from(p.m_r);
    PI * PI / 6.0 * m_r * (m_r * m_r - 1.0) * p.g_t * common_sensing_gain(p)
}

/// Range-measurement gain `|ζ_r|² = 8 π² p_s G_t M_r B² σ γ_0 / (3 c² σ_s²)`.
pub fn zeta_r_sq(p: &SystemParams) -> f64 {
    let b = p.bandwidth_b;
    let c = p.speed_of_light_c;
    8.0 * PI * PI * p.g_t * f64::from(p.m_r) * b * b / (3.0 * c * c) * common_sensing_gain(p)
}

/// Angle gain with the antenna factors stripped, `π² σ p_s γ_0 / (6 σ_s²)`.
pub fn zeta_a_tilde_sq(p: &SystemParams) -> f64 {
    PI * PI / 6.0 * common_sensing_gain(p)
}

/// Range gain with the antenna factors stripped, `8 π² p_s B² σ γ_0 / (c² σ_s²)`.
pub fn zeta_r_tilde_sq(p: &SystemParams) -> f64 {
    let b = p.bandwidth_b;
    let c = p.speed_of_light_c;
    8.0 * PI * PI * b * b / (c * c) * common_sensing_gain(p)
}
