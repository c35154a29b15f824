//! Closed-form GDoP and CRLB approximations and their large-N scaling laws.
//!
//! Every CRLB form takes the relevant `|ζ|²` gain as an argument and is
//! positively homogeneous of degree −1 in it. A zero gain yields `+∞`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DeploymentSpec;
use crate::params::SystemParams;
use crate::sensing::{mc_expected_crlb, SensingMode};
use crate::special::{NeumaierSum, EULER_GAMMA};

/// Largest `n` for which [`harmonic_sum`] sums term by term.
pub const DIRECT_SUM_LIMIT: u64 = 1_000_000;

/// `E[tr(F̃_A⁻¹)] ≈ 32 / (3N(N−1))` for uniform bearings.
pub fn gdop_aoa_closed(n: usize) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let n = n as f64;
    32.0 / (3.0 * n * (n - 1.0))
}

/// Orientation-controlled arrays, `4 / (N² − N)`.
pub fn gdop_aoa_oriented_closed(n: usize) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let n = n as f64;
    4.0 / (n * n - n)
}

/// Range-only GDoP, `2 / (N(N−1))`.
pub fn gdop_tof_closed(n: usize) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let n = n as f64;
    2.0 / (n * (n - 1.0))
}

/// Hybrid GDoP, `160 / (99N² − 67)`.
pub fn gdop_hybrid_closed(n: usize) -> f64 {
    if n < 1 {
        return f64::INFINITY;
    }
    let n = n as f64;
    160.0 / (99.0 * n * n - 67.0)
}

/// `Σ_{k=1}^{n} k^{−p}`, exact (compensated) up to [`DIRECT_SUM_LIMIT`] and
/// by [`harmonic_asymptote`] beyond.
pub fn harmonic_sum(n: u64, p: f64) -> f64 {
    if n > DIRECT_SUM_LIMIT {
        return harmonic_asymptote(n, p);
    }
    let mut s = NeumaierSum::new();
    // Smallest terms first.
    for k in (1..=n).rev() {
        let k = k as f64;
        s.add(if p == 1.0 { 1.0 / k } else { k.powf(-p) });
    }
    s.value()
}

/// Euler–Maclaurin approximation of `Σ_{k=1}^{n} k^{−p}` for `p ≥ 1`:
/// `ln n + γ + 1/(2n)` at `p = 1` and `ζ(p) − n^{1−p}/(p−1) + n^{−p}/2`
/// otherwise. `n = u64::MAX` stands for the infinite series.
pub fn harmonic_asymptote(n: u64, p: f64) -> f64 {
    let nf = n as f64;
    if p == 1.0 {
        return nf.ln() + EULER_GAMMA + 0.5 / nf;
    }
    let z = riemann_zeta(p);
    if n == u64::MAX {
        return z;
    }
    z - nf.powf(1.0 - p) / (p - 1.0) + 0.5 * nf.powf(-p)
}

/// Riemann zeta function for real `p > 1` by Euler–Maclaurin summation.
pub fn riemann_zeta(p: f64) -> f64 {
    if !(p > 1.0) {
        return f64::NAN;
    }
    const M: u64 = 12;
    // B_{2j} / (2j)!
    const COEFFS: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
    ];
    let mut s = NeumaierSum::new();
    for k in (1..M).rev() {
        s.add((k as f64).powf(-p));
    }
    let m = M as f64;
    s.add(m.powf(1.0 - p) / (p - 1.0));
    s.add(0.5 * m.powf(-p));
    // Rising factorial p (p+1) ... (p + 2j − 2) times m^{−p−2j+1}.
    let mut rising = p;
    let mut power = m.powf(-p - 1.0);
    for (j, c) in COEFFS.iter().enumerate() {
        s.add(c * rising * power);
        let k = 2.0 * j as f64;
        rising *= (p + k + 1.0) * (p + k + 2.0);
        power /= m * m;
    }
    s.value()
}

/// Expected AOA CRLB with order-statistic distances `E[d_i] ≈ √(i/(λπ))`:
///
/// `32 S₁ / (3 ζ_a² (λπ)^{β+1} S₀ (S₁² − S₂))` with
/// `S₁ = Σ i^{−β/2−1}`, `S₀ = Σ k^{−β/2}`, `S₂ = Σ i^{−β−2}`.
pub fn crlb_aoa_closed(n: usize, lambda_b: f64, beta: f64, zeta_a_sq: f64) -> f64 {
    if n < 2 || !(zeta_a_sq > 0.0) {
        return f64::INFINITY;
    }
    let n = n as u64;
    let s1 = harmonic_sum(n, beta / 2.0 + 1.0);
    let s0 = harmonic_sum(n, beta / 2.0);
    let s2 = harmonic_sum(n, beta + 2.0);
    32.0 * s1 / (3.0 * zeta_a_sq * (lambda_b * PI).powf(beta + 1.0) * s0 * (s1 * s1 - s2))
}

/// `lim CRLB_A · ln N = 320 / (3 ζ_a² λ_b³ π⁵)`.
pub fn crlb_aoa_scaling_constant(lambda_b: f64, zeta_a_sq: f64) -> f64 {
    320.0 / (3.0 * zeta_a_sq * lambda_b.powi(3) * PI.powi(5))
}

/// `lim CRLB_R · ln² N = 2 / (ζ_r² λ_b² π²)`.
pub fn crlb_tof_scaling_constant(lambda_b: f64, zeta_r_sq: f64) -> f64 {
    2.0 / (zeta_r_sq * lambda_b * lambda_b * PI * PI)
}

/// `ln N + γ + 1/(2N)`.
fn harmonic_log(n: usize) -> f64 {
    let n = n as f64;
    n.ln() + EULER_GAMMA + 0.5 / n
}

/// Range-only CRLB, `2 / (ζ_r² λ_b² π² L²)` with `L = ln N + γ + 1/(2N)`.
/// This is the hybrid expression with the angle gain set to zero.
pub fn crlb_tof_closed(n: usize, lambda_b: f64, zeta_r_sq: f64) -> f64 {
    if n < 2 || !(zeta_r_sq > 0.0) {
        return f64::INFINITY;
    }
    let l = harmonic_log(n);
    2.0 / (zeta_r_sq * lambda_b * lambda_b * PI * PI * l * l)
}

/// Which hybrid expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridForm {
    /// Pre-limit expression in `L = ln N + γ + 1/(2N)`.
    Full,
    /// `24 / (12 ζ_R λ² π² ln²N + λ³ π⁵ ζ_A ln N)`.
    Asymptotic,
}

/// Hybrid CRLB. `zeta_a_sq` and `zeta_r_sq` are the squared angle and range
/// gains, i.e. the `|ξ_A|`, `|ξ_R|` of the asymptotic form.
///
/// The full form is
///
/// ```text
///            2 ζ_R L + (π³ λ / 12) ζ_A
/// ──────────────────────────────────────────────────────────────────
/// ζ_R² π² λ² L³ + (π⁸ λ⁴ / 1280) ζ_A² L + (π⁵ λ³ / 12) ζ_R ζ_A L²
/// ```
pub fn crlb_hybrid_closed(n: usize, lambda_b: f64, zeta_a_sq: f64, zeta_r_sq: f64, form: HybridForm) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let (za, zr, lam) = (zeta_a_sq, zeta_r_sq, lambda_b);
    let value = match form {
        HybridForm::Full => {
            let l = harmonic_log(n);
            let num = 2.0 * zr * l + PI.powi(3) * lam / 12.0 * za;
            let den = zr * zr * PI * PI * lam * lam * l.powi(3)
                + PI.powi(8) * lam.powi(4) / 1280.0 * za * za * l
                + PI.powi(5) * lam.powi(3) / 12.0 * zr * za * l * l;
            num / den
        }
        HybridForm::Asymptotic => {
            let ln = (n as f64).ln();
            24.0 / (12.0 * zr * lam * lam * PI * PI * ln * ln + lam.powi(3) * PI.powi(5) * za * ln)
        }
    };
    if value.is_finite() && value > 0.0 {
        value
    } else {
        f64::INFINITY
    }
}

/// Which side of the power-constrained approximation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainForm {
    /// Per-station gains `⌊λ π D² / N⌋`.
    Floor,
    /// Gains replaced by the smooth ratio `λ π D² / N`.
    Smooth,
}

/// Transmit (or receive) gain per station when `N` stations share the
/// antennas of a disk of radius `d`: `⌊λ π D² / N⌋`.
pub fn transmit_gain_floor(lambda: f64, d: f64, n: usize) -> f64 {
    (lambda * PI * d * d / n as f64).floor()
}

fn floor_args(n: usize, lambda_t: f64, lambda_r: f64, d: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
    }
    let t = transmit_gain_floor(lambda_t, d, n);
    let r = transmit_gain_floor(lambda_r, d, n);
    if t < 1.0 || r < 1.0 {
        return Err(Error::InvalidParams(format!(
            "fewer than one antenna per station (transmit {t}, receive {r}) for n = {n}"
        )));
    }
    Ok((t, r))
}

/// AOA CRLB when `N` stations share fixed antenna densities over the disk.
///
/// With `M_r ≈ ⌊λ_r π D²/N⌋`, `G_t ≈ ⌊λ_t π D²/N⌋` and `λ_b = N/(π D²)`,
/// the large-N law becomes
/// `320 / (3 ζ̃_a² M_r³ G_t λ_b³ π⁵ ln N)`; its smooth version is
/// `320 N / (3 ζ̃_a² λ_r³ λ_t π⁶ D² ln N)`.
pub fn crlb_aoa_power_constrained(
    n: usize,
    lambda_t: f64,
    lambda_r: f64,
    d: f64,
    zeta_a_tilde_sq: f64,
    form: GainForm,
) -> Result<f64> {
    let (t, r) = floor_args(n, lambda_t, lambda_r, d)?;
    let nf = n as f64;
    let ln = nf.ln();
    Ok(match form {
        GainForm::Floor => {
            let lambda_b = nf / (PI * d * d);
            320.0 / (3.0 * zeta_a_tilde_sq * r.powi(3) * t * lambda_b.powi(3) * PI.powi(5) * ln)
        }
        GainForm::Smooth => {
            320.0 * nf / (3.0 * zeta_a_tilde_sq * lambda_r.powi(3) * lambda_t * PI.powi(6) * d * d * ln)
        }
    })
}

/// TOF counterpart of [`crlb_aoa_power_constrained`]:
/// `6 / (ζ̃_r² M_r G_t λ_b² π² ln²N)`, smooth version
/// `6 / (ζ̃_r² λ_t λ_r π² ln²N)`.
pub fn crlb_tof_power_constrained(
    n: usize,
    lambda_t: f64,
    lambda_r: f64,
    d: f64,
    zeta_r_tilde_sq: f64,
    form: GainForm,
) -> Result<f64> {
    let (t, r) = floor_args(n, lambda_t, lambda_r, d)?;
    let nf = n as f64;
    let ln2 = nf.ln().powi(2);
    Ok(match form {
        GainForm::Floor => {
            let lambda_b = nf / (PI * d * d);
            6.0 / (zeta_r_tilde_sq * r * t * lambda_b * lambda_b * PI * PI * ln2)
        }
        GainForm::Smooth => 6.0 / (zeta_r_tilde_sq * lambda_t * lambda_r * PI * PI * ln2),
    })
}

/// Monte Carlo versus closed form along a grid of cluster sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingLawReport {
    pub mode: SensingMode,
    pub n_grid: Vec<usize>,
    pub mc_values: Vec<f64>,
    pub mc_std_errors: Vec<f64>,
    pub singular_fractions: Vec<f64>,
    pub closed_values: Vec<f64>,
    /// Monte Carlo values times `ln N` (AOA) or `ln² N` (TOF, hybrid).
    pub scaled_mc: Vec<f64>,
    pub limit_constant: f64,
    /// Whether the scaled Monte Carlo values of the last two grid points
    /// differ by less than 15 %.
    pub converged: bool,
}

/// Closed-form CRLB of `mode` for `n` stations at density `lambda_b`.
pub fn crlb_closed(mode: SensingMode, n: usize, lambda_b: f64, params: &SystemParams) -> f64 {
    use crate::params::{zeta_a_sq, zeta_r_sq};
    match mode {
        SensingMode::Aoa => crlb_aoa_closed(n, lambda_b, params.beta, zeta_a_sq(params)),
        SensingMode::Tof => crlb_tof_closed(n, lambda_b, zeta_r_sq(params)),
        SensingMode::Hybrid => {
            crlb_hybrid_closed(n, lambda_b, zeta_a_sq(params), zeta_r_sq(params), HybridForm::Full)
        }
        SensingMode::AoaOriented => gdop_aoa_oriented_closed(n),
    }
}

/// Runs the fixed-N Monte Carlo CRLB on each `n` (disk radius
/// `√(n/(λ_b π))`, so the density stays `lambda_b`) and compares it with the
/// closed form and the scaling constant.
pub fn scaling_law_report(
    mode: SensingMode,
    n_grid: &[usize],
    lambda_b: f64,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<ScalingLawReport> {
    use crate::params::{zeta_a_sq, zeta_r_sq};
    use crate::rng::derive_seed;

    let limit_constant = match mode {
        SensingMode::Aoa => crlb_aoa_scaling_constant(lambda_b, zeta_a_sq(params)),
        SensingMode::Tof | SensingMode::Hybrid => crlb_tof_scaling_constant(lambda_b, zeta_r_sq(params)),
        SensingMode::AoaOriented => {
            return Err(Error::InvalidParams("aoa_oriented has no CRLB scaling law".into()));
        }
    };
    let mut report = ScalingLawReport {
        mode,
        n_grid: n_grid.to_vec(),
        mc_values: Vec::new(),
        mc_std_errors: Vec::new(),
        singular_fractions: Vec::new(),
        closed_values: Vec::new(),
        scaled_mc: Vec::new(),
        limit_constant,
        converged: false,
    };
    for (k, &n) in n_grid.iter().enumerate() {
        let spec = DeploymentSpec::fixed_n_at_density(n, lambda_b);
        let est = mc_expected_crlb(mode, &spec, params, trials, derive_seed(seed, k as u64))?;
        let ln = (n as f64).ln();
        let scale = if mode == SensingMode::Aoa { ln } else { ln * ln };
        report.mc_values.push(est.mean());
        report.mc_std_errors.push(est.std_error());
        report.singular_fractions.push(est.singular_fraction());
        report.closed_values.push(crlb_closed(mode, n, lambda_b, params));
        report.scaled_mc.push(est.mean() * scale);
    }
    if let [.., a, b] = report.scaled_mc[..] {
        report.converged = ((b - a) / a).abs() < 0.15;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gdop_values() {
        assert!(rel(gdop_aoa_closed(2), 16.0 / 3.0) < 1e-15);
        assert!(rel(gdop_aoa_closed(4), 8.0 / 9.0) < 1e-15);
        assert_eq!(gdop_aoa_oriented_closed(2), 2.0);
        assert_eq!(gdop_tof_closed(2), 1.0);
        assert!(rel(gdop_tof_closed(3), 1.0 / 3.0) < 1e-15);
        assert!(rel(gdop_hybrid_closed(2), 160.0 / 329.0) < 1e-15);
        assert!((gdop_hybrid_closed(2) - 0.48632).abs() < 1e-5);
        assert_eq!(gdop_aoa_closed(1), f64::INFINITY);
    }

    #[test]
    fn orientation_gain_is_eight_thirds() {
        for n in 2..200 {
            assert!(rel(gdop_aoa_closed(n) / gdop_aoa_oriented_closed(n), 8.0 / 3.0) < 1e-14);
        }
    }

    #[test]
    fn hybrid_to_tof_ratio_limit() {
        let n = 1_000_000;
        assert!(rel(gdop_hybrid_closed(n) / gdop_tof_closed(n), 80.0 / 99.0) < 1e-5);
    }

    #[test]
    fn gdop_forms_strictly_decrease() {
        for n in 2..500 {
            assert!(gdop_aoa_closed(n + 1) < gdop_aoa_closed(n));
            assert!(gdop_aoa_oriented_closed(n + 1) < gdop_aoa_oriented_closed(n));
            assert!(gdop_tof_closed(n + 1) < gdop_tof_closed(n));
            assert!(gdop_hybrid_closed(n + 1) < gdop_hybrid_closed(n));
        }
    }

    #[test]
    fn harmonic_sums() {
        assert!((harmonic_sum(10, 1.0) - 2.928968).abs() < 1e-6);
        assert!((harmonic_sum(10, 1.0) - harmonic_asymptote(10, 1.0)).abs() < 1e-3);
        assert!((harmonic_sum(10_000, 2.0) - PI * PI / 6.0).abs() < 1e-4);
        assert!((harmonic_asymptote(u64::MAX, 2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(3.0) - 1.202_056_903_159_594_3).abs() < 1e-14);
        // Continuity across the switch to the asymptote.
        let below = harmonic_sum(DIRECT_SUM_LIMIT, 1.5);
        let above = harmonic_sum(DIRECT_SUM_LIMIT + 1, 1.5);
        assert!((above - below - (DIRECT_SUM_LIMIT as f64 + 1.0).powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn aoa_closed_two_stations() {
        let v = crlb_aoa_closed(2, 1.0, 2.0, 1.0);
        assert!(rel(v, 40.0 / (3.0 * PI.powi(3) * 0.75)) < 1e-14);
        assert!((v - 0.573_36).abs() < 1e-5);
    }

    #[test]
    fn scaling_constants() {
        assert!((crlb_aoa_scaling_constant(1.0, 1.0) - 0.34856).abs() < 1e-5);
        assert!(rel(crlb_aoa_scaling_constant(1.0, 1.0) / crlb_aoa_scaling_constant(2.0, 1.0), 8.0) < 1e-14);
        assert!((crlb_tof_scaling_constant(1.0, 1.0) - 0.20264).abs() < 1e-5);
        assert!(rel(crlb_tof_scaling_constant(1.0, 1.0) / crlb_tof_scaling_constant(2.0, 1.0), 4.0) < 1e-14);
    }

    #[test]
    fn aoa_closed_approaches_its_scaling_constant() {
        let n = 1000;
        let scaled = crlb_aoa_closed(n, 1.0, 2.0, 1.0) * (n as f64).ln();
        assert!(rel(scaled, crlb_aoa_scaling_constant(1.0, 1.0)) < 0.25, "{scaled}");
    }

    #[test]
    fn hybrid_limits() {
        for n in [4usize, 10, 100, 10_000] {
            let l = harmonic_log(n);
            let tof_only = crlb_hybrid_closed(n, 1.0, 0.0, 1.0, HybridForm::Full);
            assert!(rel(tof_only, 2.0 / (PI * PI * l * l)) < 1e-14);
            assert!(rel(tof_only, crlb_tof_closed(n, 1.0, 1.0)) < 1e-14);
            let aoa_only = crlb_hybrid_closed(n, 1.0, 1.0, 0.0, HybridForm::Full);
            assert!(rel(aoa_only, 320.0 / (3.0 * PI.powi(5) * l)) < 1e-14);
        }
    }

    #[test]
    fn hybrid_dominates_single_modes() {
        let mut n = 4usize;
        while n <= 10_000 {
            let h = crlb_hybrid_closed(n, 1.0, 1.0, 1.0, HybridForm::Full);
            assert!(h <= crlb_aoa_closed(n, 1.0, 2.0, 1.0), "n={n}");
            assert!(h <= crlb_tof_closed(n, 1.0, 1.0), "n={n}");
            n += 1 + n / 10;
        }
    }

    #[test]
    fn hybrid_full_and_asymptotic_agree_for_large_n() {
        for n in [1000usize, 5000, 100_000] {
            let full = crlb_hybrid_closed(n, 1.0, 1.0, 1.0, HybridForm::Full);
            let asym = crlb_hybrid_closed(n, 1.0, 1.0, 1.0, HybridForm::Asymptotic);
            assert!(rel(asym, full) < 0.05, "n={n}: {asym} vs {full}");
        }
    }

    #[test]
    fn forms_are_homogeneous_in_the_gain() {
        let k = 3.7;
        assert!(rel(crlb_aoa_closed(9, 2e-5, 2.0, k), crlb_aoa_closed(9, 2e-5, 2.0, 1.0) / k) < 1e-14);
        assert!(rel(crlb_tof_closed(9, 2e-5, k), crlb_tof_closed(9, 2e-5, 1.0) / k) < 1e-14);
        assert!(rel(
            crlb_hybrid_closed(9, 2e-5, k * 2.0, k * 5.0, HybridForm::Full),
            crlb_hybrid_closed(9, 2e-5, 2.0, 5.0, HybridForm::Full) / k
        ) < 1e-13);
        assert!(rel(crlb_aoa_scaling_constant(1.0, k), crlb_aoa_scaling_constant(1.0, 1.0) / k) < 1e-14);
        assert!(rel(crlb_tof_scaling_constant(1.0, k), crlb_tof_scaling_constant(1.0, 1.0) / k) < 1e-14);
    }

    #[test]
    fn power_constrained_monotonicity() {
        let (lt, lr, d) = (50e-6, 50e-6, 2000.0);
        let aoa = |n| crlb_aoa_power_constrained(n, lt, lr, d, 1.0, GainForm::Smooth).unwrap();
        let tof = |n| crlb_tof_power_constrained(n, lt, lr, d, 1.0, GainForm::Smooth).unwrap();
        for n in 3..600 {
            assert!(aoa(n + 1) > aoa(n), "aoa n={n}");
            assert!(tof(n + 1) < tof(n), "tof n={n}");
        }
    }

    #[test]
    fn power_constrained_floor_and_smooth_forms() {
        // Dense grid of floor arguments x = λπD²/N (transmit and receive
        // densities equal). The TOF form carries one floor per density and
        // stays within 30 % from x = 8; the AOA form carries the receive
        // floor cubed and needs x ≥ 16.
        let d = 1000.0;
        for i in 0..4000 {
            let n = 20usize;
            let x = 8.0 + i as f64 * 0.014;
            let lambda = x * n as f64 / (PI * d * d);
            let tof_f = crlb_tof_power_constrained(n, lambda, lambda, d, 1.0, GainForm::Floor).unwrap();
            let tof_s = crlb_tof_power_constrained(n, lambda, lambda, d, 1.0, GainForm::Smooth).unwrap();
            assert!(rel(tof_s, tof_f) < 0.30, "tof x={x}");
            let aoa_f = crlb_aoa_power_constrained(n, lambda, lambda, d, 1.0, GainForm::Floor).unwrap();
            let aoa_s = crlb_aoa_power_constrained(n, lambda, lambda, d, 1.0, GainForm::Smooth).unwrap();
            if x >= 16.0 {
                assert!(rel(aoa_s, aoa_f) < 0.30, "aoa x={x}");
            }
        }
        // Just below an integer the AOA floor loses almost a whole antenna.
        let x: f64 = 8.999;
        let lambda = x * 20.0 / (PI * d * d);
        let aoa_f = crlb_aoa_power_constrained(20, lambda, lambda, d, 1.0, GainForm::Floor).unwrap();
        let aoa_s = crlb_aoa_power_constrained(20, lambda, lambda, d, 1.0, GainForm::Smooth).unwrap();
        assert!(rel(aoa_s, aoa_f) > 0.30);
    }

    #[test]
    fn power_constrained_rejects_missing_antennas() {
        let d = 100.0;
        let lambda = 0.5 * 10.0 / (PI * d * d);
        assert!(crlb_aoa_power_constrained(10, lambda, lambda, d, 1.0, GainForm::Floor).is_err());
        assert!(crlb_tof_power_constrained(1, 1.0, 1.0, d, 1.0, GainForm::Smooth).is_err());
    }

    #[test]
    fn smooth_forms_match_scaling_laws_at_integer_gains() {
        // With exact integer gains the floor form equals the smooth one.
        let (n, d) = (25usize, 500.0);
        let lambda = 12.0 * n as f64 / (PI * d * d);
        let f = crlb_tof_power_constrained(n, lambda, lambda, d, 2.0, GainForm::Floor).unwrap();
        let s = crlb_tof_power_constrained(n, lambda, lambda, d, 2.0, GainForm::Smooth).unwrap();
        assert!(rel(f, s) < 1e-12);
        let f = crlb_aoa_power_constrained(n, lambda, lambda, d, 2.0, GainForm::Floor).unwrap();
        let s = crlb_aoa_power_constrained(n, lambda, lambda, d, 2.0, GainForm::Smooth).unwrap();
        assert!(rel(f, s) < 1e-12);
    }
}
