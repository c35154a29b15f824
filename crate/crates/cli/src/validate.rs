//! Oracle suite behind `validate_formulas`.
//!
//! Every check reports a measured error and the tolerance it must stay
//! under; `tolerance_scale` multiplies all tolerances.

use std::f64::consts::PI;

use isac_core::comms::{g_of_mt, h1, h2, laplace_interference, laplace_useful, mc_laplace_interference, mc_laplace_useful, GPath};
use isac_core::params::per_km2;
use isac_core::sensing::{fim_aoa, fim_hybrid, fim_tof, trace_inverse, Fim2};
use isac_core::special::{
    beta_fn, gamma_fn, integrate, integrate_semi_infinite, lower_incomplete_beta, lower_incomplete_gamma,
    upper_incomplete_beta, upper_incomplete_gamma, QuadratureSpec,
};
use isac_core::{NetworkRealization, Result, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::output::Table;
use crate::Outputs;

/// Brute-force Fisher information: `Σ_links ∇h ∇hᵀ / var` over all `N²`
/// transmitter/receiver pairs, with the variances written out from the
/// measurement model.
pub fn jacobian_fims(r: &NetworkRealization, p: &SystemParams) -> (Fim2, Fim2) {
    let n = r.n();
    let m_r = f64::from(p.m_r);
    let (b, c) = (p.bandwidth_b, p.speed_of_light_c);
    let (mut fa, mut fr) = ([0.0f64; 3], [0.0f64; 3]);
    for i in 0..n {
        for j in 0..n {
            let (di, ti) = (r.distances[i], r.bearings[i]);
            let (dj, tj) = (r.distances[j], r.bearings[j]);
            let snr = p.rcs_sigma * p.p_s * p.gamma_0 / (di.powf(p.beta) * dj.powf(p.beta));
            let ga = [ti.sin() / di, -ti.cos() / di];
            let rho2 = 6.0 * p.noise_sigma_s2 / (PI * PI * ti.cos().powi(2) * m_r * (m_r * m_r - 1.0) * p.g_t * snr);
            let gr = [-(ti.cos() + tj.cos()), -(ti.sin() + tj.sin())];
            let eta2 = 3.0 * c * c * p.noise_sigma_s2 / (8.0 * PI * PI * p.g_t * m_r * b * b * snr);
            if rho2.is_finite() {
                fa[0] += ga[0] * ga[0] / rho2;
                fa[1] += ga[0] * ga[1] / rho2;
                fa[2] += ga[1] * ga[1] / rho2;
            }
            fr[0] += gr[0] * gr[0] / eta2;
            fr[1] += gr[0] * gr[1] / eta2;
            fr[2] += gr[1] * gr[1] / eta2;
        }
    }
    (Fim2::new(fa[0], fa[1], fa[2]), Fim2::new(fr[0], fr[1], fr[2]))
}

fn max_rel_diff(a: &Fim2, b: &Fim2) -> f64 {
    let scale = b.max_abs();
    [(a.f11, b.f11), (a.f12, b.f12), (a.f22, b.f22)]
        .iter()
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

fn random_realization(rng: &mut ChaCha8Rng, n_max: usize) -> NetworkRealization {
    let n = rng.random_range(1..=n_max);
    let distances = (0..n).map(|_| rng.random_range(1.0..2000.0)).collect();
    let bearings = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    NetworkRealization::new(distances, bearings).expect("valid realization")
}

fn random_sensing_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let mut p = SystemParams::baseline();
    p.beta = rng.random_range(2.0..4.0);
    p.m_r = rng.random_range(2..=16);
    p.g_t = rng.random_range(0.5..8.0);
    p.p_s = rng.random_range(0.05..1.0);
    p.p_c = 1.0 - p.p_s;
    p.bandwidth_b = rng.random_range(1e6..1e8);
    p
}

/// Largest relative deviation of the factorized FIMs from
/// [`jacobian_fims`] over random instances.
pub fn fim_oracle_deviation(instances: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let r = random_realization(&mut rng, 12);
        let p = random_sensing_params(&mut rng);
        let (oa, or) = jacobian_fims(&r, &p);
        worst = worst.max(max_rel_diff(&fim_aoa(&r, &p), &oa));
        worst = worst.max(max_rel_diff(&fim_tof(&r, &p), &or));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    pub realizations: usize,
    /// Largest `(tr H⁻¹ − min(tr A⁻¹, tr R⁻¹)) / min(…)`, floored at zero.
    pub max_violation: f64,
    /// Realizations whose violation exceeds `tolerance`.
    pub violations: usize,
    /// Single-station realizations where the hybrid CRLB was not finite or
    /// a single-mode CRLB was.
    pub single_station_failures: usize,
}

/// Hybrid CRLB against both single-mode CRLBs on random realizations with
/// `N ∈ 1..=20` and random positive gains.
pub fn dominance_sweep(realizations: usize, seed: u64, tolerance: f64) -> DominanceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DominanceReport {
        realizations,
        max_violation: 0.0,
        violations: 0,
        single_station_failures: 0,
    };
    for _ in 0..realizations {
        let r = random_realization(&mut rng, 20);
        let p = random_sensing_params(&mut rng);
        let h = trace_inverse(&fim_hybrid(&r, &p));
        let a = trace_inverse(&fim_aoa(&r, &p));
        let t = trace_inverse(&fim_tof(&r, &p));
        if r.n() == 1 && (!h.is_finite() || a.is_finite() || t.is_finite()) {
            report.single_station_failures += 1;
        }
        let m = a.min(t);
        let violation = if m.is_finite() {
            ((h - m) / m).max(0.0)
        } else if h.is_finite() {
            0.0
        } else {
            f64::INFINITY
        };
        report.max_violation = report.max_violation.max(violation);
        if violation > tolerance {
            report.violations += 1;
        }
    }
    report
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-13, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `∫₀^a t^{b−1}(1−t)^{c−1} dt` after `t = a v^{1/b}`.
pub fn beta_oracle(a: f64, b: f64, c: f64) -> Result<f64> {
    let inner = integrate(|v: f64| (1.0 - a * v.powf(1.0 / b)).powf(c - 1.0), 0.0, 1.0, &tight())?.value;
    Ok(a.powf(b) / b * inner)
}

/// `∫₀^x t^{s−1} e^{−t} dt` after `t = x v^{1/s}`.
pub fn lower_gamma_oracle(s: f64, x: f64) -> Result<f64> {
    let inner = integrate(|v: f64| (-x * v.powf(1.0 / s)).exp(), 0.0, 1.0, &tight())?.value;
    Ok(x.powf(s) / s * inner)
}

pub fn upper_gamma_oracle(s: f64, x: f64) -> Result<f64> {
    Ok(integrate_semi_infinite(|u: f64| (x + u).powf(s - 1.0) * (-(x + u)).exp(), &tight())?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFunctionReport {
    pub beta_quadrature: f64,
    pub gamma_quadrature: f64,
    pub beta_identities: f64,
    pub gamma_identities: f64,
}

/// Incomplete Beta and Gamma against their defining integrals, and the
/// complementarity and recurrence identities, on `triples` random
/// parameter sets each.
pub fn special_function_deviation(triples: usize, seed: u64) -> Result<SpecialFunctionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SpecialFunctionReport {
        beta_quadrature: 0.0,
        gamma_quadrature: 0.0,
        beta_identities: 0.0,
        gamma_identities: 0.0,
    };
    for _ in 0..triples {
        let (a, b, c) = (rng.random_range(0.01..0.95), rng.random_range(0.2..6.0), rng.random_range(0.2..6.0));
        r.beta_quadrature = r.beta_quadrature.max(rel(lower_incomplete_beta(a, b, c)?, beta_oracle(a, b, c)?));
        let (s, x) = (rng.random_range(0.2..6.0), rng.random_range(0.05..20.0));
        r.gamma_quadrature = r.gamma_quadrature.max(rel(lower_incomplete_gamma(s, x)?, lower_gamma_oracle(s, x)?));
        let s_any = rng.random_range(-3.0..5.0);
        r.gamma_quadrature = r
            .gamma_quadrature
            .max(rel(upper_incomplete_gamma(s_any, x)?, upper_gamma_oracle(s_any, x)?));

        let total = lower_incomplete_beta(a, b, c)? + upper_incomplete_beta(a, b, c)?;
        r.beta_identities = r.beta_identities.max(rel(total, beta_fn(b, c)?));
        let up = lower_incomplete_beta(a, b + 1.0, c)?;
        let rec = (b * lower_incomplete_beta(a, b, c)? - a.powf(b) * (1.0 - a).powf(c)) / (b + c);
        r.beta_identities = r.beta_identities.max(rel(rec, up));
        let total = lower_incomplete_gamma(s, x)? + upper_incomplete_gamma(s, x)?;
        r.gamma_identities = r.gamma_identities.max(rel(total, gamma_fn(s)));
        let lhs = upper_incomplete_gamma(s_any + 1.0, x)?;
        let rhs = s_any * upper_incomplete_gamma(s_any, x)? + x.powf(s_any) * (-x).exp();
        r.gamma_identities = r.gamma_identities.max(rel(lhs, rhs));
    }
    Ok(r)
}

/// `H₁`, `H₂` against their radial integrals.
fn transform_deviation() -> Result<(f64, f64)> {
    let spec = QuadratureSpec::default().with_tolerances(1e-12, 0.0);
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for &(x, k, alpha, d) in &[
        (1e8, 3.0, 4.0, 100.0),
        (1e10, 7.0, 4.0, 100.0),
        (2.0, 2.0, 3.0, 1.5),
        (50.0, 5.0, 6.0, 2.0),
        (0.3, 1.0, 2.5, 1.0),
    ] {
        let o1 = 2.0 * d * d
            * integrate(|s: f64| -(-k * (x * (s * d).powf(-alpha)).ln_1p()).exp_m1() * s, 0.0, 1.0, &spec)?.value;
        let o2 = 2.0 * d * d
            * integrate(
                |s: f64| {
                    let q = x * (d / s).powf(-alpha);
                    q / (1.0 + q) / (s * s * s)
                },
                0.0,
                1.0,
                &spec,
            )?
            .value;
        w1 = w1.max(rel(h1(x, k, alpha, d)?, o1));
        w2 = w2.max(rel(h2(x, alpha, d)?, o2));
    }
    Ok((w1, w2))
}

struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
}

/// Runs every oracle check and writes `validation` with one row per check.
pub fn validate_formulas(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let scale = config.options.tolerance_scale.unwrap_or(1.0);
    let seed = config.seed;
    let t = out.add(Table::new("validation", &["check", "measured", "tolerance", "pass"]));
    let mut checks = vec![Check {
        name: "fim_vs_jacobian",
        measured: fim_oracle_deviation(1000, seed),
        tolerance: 1e-12,
    }];
    let dominance = dominance_sweep(10_000, seed.wrapping_add(1), 1e-9 * scale);
    checks.push(Check {
        name: "hybrid_dominance_max_violation",
        measured: dominance.max_violation,
        tolerance: 1e-9,
    });
    checks.push(Check {
        name: "single_station_hybrid_failures",
        measured: dominance.single_station_failures as f64,
        tolerance: 0.0,
    });
    let sf = special_function_deviation(100, seed.wrapping_add(2))?;
    checks.push(Check {
        name: "incomplete_beta_vs_quadrature",
        measured: sf.beta_quadrature,
        tolerance: 1e-8,
    });
    checks.push(Check {
        name: "incomplete_gamma_vs_quadrature",
        measured: sf.gamma_quadrature,
        tolerance: 1e-8,
    });
    checks.push(Check {
        name: "beta_identities",
        measured: sf.beta_identities,
        tolerance: 1e-10,
    });
    checks.push(Check {
        name: "gamma_identities",
        measured: sf.gamma_identities,
        tolerance: 1e-10,
    });
    let (w1, w2) = transform_deviation()?;
    checks.push(Check {
        name: "h1_vs_radial_integral",
        measured: w1,
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "h2_vs_radial_integral",
        measured: w2,
        tolerance: 1e-6,
    });

    let mut p = SystemParams::baseline();
    p.lambda_t = per_km2(300.0);
    p.coop_radius_d = 100.0;
    let p = p.with_m_t(4);
    let zs = [1e7, 1e8];
    let mc_u = mc_laplace_useful(&zs, &p, config.trials, seed.wrapping_add(3))?;
    let mc_i = mc_laplace_interference(&zs, &p, None, config.trials, seed.wrapping_add(4))?;
    let (mut eu, mut ei) = (0.0f64, 0.0f64);
    for (k, &z) in zs.iter().enumerate() {
        eu = eu.max(rel(laplace_useful(z, &p)?, mc_u[k].mean));
        ei = ei.max(rel(laplace_interference(z, &p)?, mc_i[k].mean));
    }
    checks.push(Check {
        name: "laplace_useful_vs_mc",
        measured: eu,
        tolerance: 0.02,
    });
    checks.push(Check {
        name: "laplace_interference_vs_mc",
        measured: ei,
        tolerance: 0.02,
    });

    let mut g = 0.0f64;
    for alpha in [2.5, 4.0, 8.0] {
        let mut q = p.clone();
        q.alpha = alpha;
        let eps = 1e-3 * PI * q.lambda_t * q.coop_radius_d.powi(2);
        for m in [1, 4, 9] {
            let a = g_of_mt(m, &q, eps, GPath::IncompleteGamma)?;
            let b = g_of_mt(m, &q, eps, GPath::Quadrature)?;
            g = g.max(rel(a, b - f64::from(m) * (1.0 - (-eps).exp())));
        }
    }
    checks.push(Check {
        name: "g_paths_relation",
        measured: g,
        tolerance: 1e-7,
    });

    for c in checks {
        let tolerance = c.tolerance * scale;
        let pass = c.measured <= tolerance;
        out.checks_failed |= !pass;
        out.tables[t].push(vec![c.name.into(), c.measured.into(), tolerance.into(), pass.into()]);
    }
    Ok(())
}
