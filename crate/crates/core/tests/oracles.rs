//! Independent oracles for the measurement model and the special functions.

use std::f64::consts::PI;

use isac_core::geometry::NetworkRealization;
use isac_core::params::{zeta_a_sq, zeta_a_tilde_sq, zeta_r_sq, zeta_r_tilde_sq, SPEED_OF_LIGHT};
use isac_core::sensing::{fim_aoa, fim_tof, Fim2};
use isac_core::special::{
    beta_fn, gamma_fn, integrate, integrate_semi_infinite, lower_incomplete_beta, lower_incomplete_gamma,
    upper_incomplete_beta, upper_incomplete_gamma, QuadratureSpec,
};
use isac_core::SystemParams;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn measurement_gains_match_high_precision_values() {
    // M_r = 10, G_t = 1, σ γ_0 = 1, σ_s² = 1e-10, p_s = 0.5, B = 10 MHz.
    let p = SystemParams::baseline();
    assert_eq!(p.speed_of_light_c, SPEED_OF_LIGHT);
    assert!(rel(zeta_a_sq(&p), 8_142_423_630_898.720_860_5) < 1e-14);
    assert!(rel(zeta_r_sq(&p), 1_464_188_785.346_548_5) < 1e-14);
    assert!(rel(zeta_a_tilde_sq(&p), 8_224_670_334.241_132_2) < 1e-14);
    assert!(rel(zeta_r_tilde_sq(&p), 439_256_635.603_964_56) < 1e-14);
}

/// `Jᵀ Σ⁻¹ J` over all `N²` transmitter/receiver links, with the variances
/// written out from the measurement model.
fn jacobian_fims(r: &NetworkRealization, p: &SystemParams) -> (Fim2, Fim2) {
    let n = r.n();
    let links = n * n;
    let mut ja = DMatrix::<f64>::zeros(links, 2);
    let mut jr = DMatrix::<f64>::zeros(links, 2);
    let mut wa = DVector::<f64>::zeros(links);
    let mut wr = DVector::<f64>::zeros(links);
    let m_r = f64::from(p.m_r);
    let b = p.bandwidth_b;
    let c = p.speed_of_light_c;
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let (di, ti) = (r.distances[i], r.bearings[i]);
            let (dj, tj) = (r.distances[j], r.bearings[j]);
            let snr = p.rcs_sigma * p.p_s * p.gamma_0 / (di.powf(p.beta) * dj.powf(p.beta));
            // Bearing seen at receiver i; the target sits at the origin.
            ja[(k, 0)] = ti.sin() / di;
            ja[(k, 1)] = -ti.cos() / di;
            let rho2 = 6.0 * p.noise_sigma_s2
                / (PI * PI * ti.cos().powi(2) * m_r * (m_r * m_r - 1.0) * p.g_t * snr);
            wa[k] = 1.0 / rho2;
            // Bistatic range d_i + d_j.
            jr[(k, 0)] = -(ti.cos() + tj.cos());
            jr[(k, 1)] = -(ti.sin() + tj.sin());
            let eta2 = 3.0 * c * c * p.noise_sigma_s2 / (8.0 * PI * PI * p.g_t * m_r * b * b * snr);
            wr[k] = 1.0 / eta2;
        }
    }
    let fa = ja.transpose() * DMatrix::from_diagonal(&wa) * &ja;
    let fr = jr.transpose() * DMatrix::from_diagonal(&wr) * &jr;
    let to_fim = |m: DMatrix<f64>| Fim2::new(m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    (to_fim(fa), to_fim(fr))
}

fn max_rel_diff(a: &Fim2, b: &Fim2) -> f64 {
    let scale = b.max_abs();
    [(a.f11, b.f11), (a.f12, b.f12), (a.f22, b.f22)]
        .iter()
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

#[test]
fn factorized_fims_match_jacobian_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=12);
        let distances: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2000.0)).collect();
        let bearings: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let r = NetworkRealization::new(distances, bearings).unwrap();
        let mut p = SystemParams::baseline();
        p.beta = rng.random_range(2.0..4.0);
        p.m_r = rng.random_range(2..=16);
        p.g_t = rng.random_range(0.5..8.0);
        p.p_s = rng.random_range(0.05..1.0);
        p.p_c = 1.0 - p.p_s;
        let (oa, or) = jacobian_fims(&r, &p);
        worst = worst.max(max_rel_diff(&fim_aoa(&r, &p), &oa));
        worst = worst.max(max_rel_diff(&fim_tof(&r, &p), &or));
    }
    assert!(worst <= 1e-12, "worst relative deviation {worst:e}");
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-13, 0.0)
}

/// `∫₀^a t^{b−1}(1−t)^{c−1} dt` with `t = a v^{1/b}`, which removes the
/// singularity at the origin.
fn beta_oracle(a: f64, b: f64, c: f64) -> f64 {
    let inner = integrate(|v: f64| (1.0 - a * v.powf(1.0 / b)).powf(c - 1.0), 0.0, 1.0, &tight())
        .unwrap()
        .value;
    a.powf(b) / b * inner
}

/// `∫₀^x t^{s−1} e^{−t} dt` with `t = x v^{1/s}`.
fn lower_gamma_oracle(s: f64, x: f64) -> f64 {
    let inner = integrate(|v: f64| (-x * v.powf(1.0 / s)).exp(), 0.0, 1.0, &tight())
        .unwrap()
        .value;
    x.powf(s) / s * inner
}

fn upper_gamma_oracle(s: f64, x: f64) -> f64 {
    integrate_semi_infinite(|u: f64| (x + u).powf(s - 1.0) * (-(x + u)).exp(), &tight())
        .unwrap()
        .value
}

#[test]
fn incomplete_functions_match_defining_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = (rng.random_range(0.01..0.95), rng.random_range(0.2..6.0), rng.random_range(0.2..6.0));
        worst = worst.max(rel(lower_incomplete_beta(a, b, c).unwrap(), beta_oracle(a, b, c)));
        let (s, x) = (rng.random_range(0.2..6.0), rng.random_range(0.05..20.0));
        worst = worst.max(rel(lower_incomplete_gamma(s, x).unwrap(), lower_gamma_oracle(s, x)));
        let s_any = rng.random_range(-3.0..5.0);
        worst = worst.max(rel(upper_incomplete_gamma(s_any, x).unwrap(), upper_gamma_oracle(s_any, x)));
    }
    assert!(worst <= 1e-8, "worst relative deviation {worst:e}");
}

#[test]
fn complementarity_and_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (a, b, c) = (rng.random_range(0.0..1.0), rng.random_range(0.2..8.0), rng.random_range(0.2..8.0));
        let total = lower_incomplete_beta(a, b, c).unwrap() + upper_incomplete_beta(a, b, c).unwrap();
        assert!(rel(total, beta_fn(b, c).unwrap()) <= 1e-10);
        // B(a; b+1, c) = (b B(a; b, c) − a^b (1−a)^c) / (b + c)
        let lhs = lower_incomplete_beta(a, b + 1.0, c).unwrap();
        let rhs = (b * lower_incomplete_beta(a, b, c).unwrap() - a.powf(b) * (1.0 - a).powf(c)) / (b + c);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300), "a={a} b={b} c={c}");

        let (s, x) = (rng.random_range(0.1..8.0), rng.random_range(0.01..30.0));
        let total = lower_incomplete_gamma(s, x).unwrap() + upper_incomplete_gamma(s, x).unwrap();
        assert!(rel(total, gamma_fn(s)) <= 1e-10);
        let s_any = rng.random_range(-4.0..6.0);
        let lhs = upper_incomplete_gamma(s_any + 1.0, x).unwrap();
        let rhs = s_any * upper_incomplete_gamma(s_any, x).unwrap() + x.powf(s_any) * (-x).exp();
        assert!(rel(lhs, rhs) <= 1e-10, "s={s_any} x={x}");
    }
}
