//! Fisher information for AOA, TOF and hybrid localization of the target.
//!
//! Every ordered pair `(i, j)` of cooperating stations forms a bistatic
//! link: station `j` illuminates the target and station `i` receives the
//! echo. A link yields a bearing measurement (at receiver `i`) and a
//! bistatic range measurement `d_i + d_j`. The builders below use factorized
//! sums that cost O(N) instead of O(N²).

mod monte_carlo;

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::geometry::NetworkRealization;
use crate::params::{zeta_a_sq, zeta_r_sq, SystemParams};

pub use monte_carlo::{mc_expected_crlb, mc_expected_gdop, CrlbEstimate};

/// Relative determinant threshold below which a matrix counts as singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// `|cos θ|` at or below this value carries no angle information.
pub const COS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensingMode {
    Aoa,
    Tof,
    Hybrid,
    /// AOA with arrays rotated to face the target. Geometry-only.
    AoaOriented,
}

impl SensingMode {
    pub fn name(&self) -> &'static str {
        match self {
            SensingMode::Aoa => "aoa",
            SensingMode::Tof => "tof",
            SensingMode::Hybrid => "hybrid",
            SensingMode::AoaOriented => "aoa_oriented",
        }
    }
}

/// Symmetric 2×2 matrix over the target position `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Fim2 {
    pub f11: f64,
    pub f12: f64,
    pub f22: f64,
}

impl Fim2 {
    pub fn new(f11: f64, f12: f64, f22: f64) -> Self {
        Self { f11, f12, f22 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn trace(&self) -> f64 {
        self.f11 + self.f22
    }

    pub fn det(&self) -> f64 {
        self.f11 * self.f22 - self.f12 * self.f12
    }

    /// Nonnegative diagonal and `det ≥ −tol · trace²`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.f11 >= 0.0 && self.f22 >= 0.0 && self.det() >= -tol * self.trace().powi(2)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.f11.abs().max(self.f12.abs()).max(self.f22.abs())
    }

    /// `s · s sᵀ` for the 2-vector `(x, y)`.
    fn outer(x: f64, y: f64, s: f64) -> Self {
        Self::new(s * x * x, s * x * y, s * y * y)
    }
}

impl Add for Fim2 {
    type Output = Fim2;

    fn add(self, o: Fim2) -> Fim2 {
        Fim2::new(self.f11 + o.f11, self.f12 + o.f12, self.f22 + o.f22)
    }
}

impl Mul<f64> for Fim2 {
    type Output = Fim2;

    fn mul(self, k: f64) -> Fim2 {
        Fim2::new(self.f11 * k, self.f12 * k, self.f22 * k)
    }
}

/// `tr(F⁻¹)`, or `+∞` when `det ≤ 10⁻¹² · tr²` (including the zero matrix).
pub fn trace_inverse(f: &Fim2) -> f64 {
    let t = f.trace();
    let det = f.det();
    if !(t > 0.0) || det <= SINGULAR_RTOL * t * t {
        return f64::INFINITY;
    }
    t / det
}

fn pow_neg(d: f64, exponent: f64) -> f64 {
    if exponent == 2.0 {
        1.0 / (d * d)
    } else {
        d.powf(-exponent)
    }
}

/// Echo SNR of link `(i, j)`: `σ p_s γ_0 / (d_i^β d_j^β)`.
pub fn link_snr(i: usize, j: usize, r: &NetworkRealization, p: &SystemParams) -> f64 {
    p.rcs_sigma * p.p_s * p.gamma_0 * pow_neg(r.distances[i], p.beta) * pow_neg(r.distances[j], p.beta)
}

/// Bearing error variance of link `(i, j)`, rad²:
/// `6 σ_s² / (π² cos²θ_i M_r (M_r² − 1) G_t γ_ij)`.
///
/// Returns `+∞` for a link that carries no angle information.
pub fn aoa_variance(i: usize, j: usize, r: &NetworkRealization, p: &SystemParams) -> f64 {
    let c = r.bearings[i].cos();
    if c.abs() <= COS_EPS {
        return f64::INFINITY;
    }
    let m_r = f64::from(p.m_r);
    let info = PI * PI * c * c * m_r * (m_r * m_r - 1.0) * p.g_t * link_snr(i, j, r, p);
    if info > 0.0 {
        6.0 * p.noise_sigma_s2 / info
    } else {
        f64::INFINITY
    }
}

/// Bistatic range error variance of link `(i, j)`, m²:
/// `3 c² σ_s² / (8 π² G_t M_r B² γ_ij)`.
pub fn tof_variance(i: usize, j: usize, r: &NetworkRealization, p: &SystemParams) -> f64 {
    let b = p.bandwidth_b;
    let info = 8.0 * PI * PI * p.g_t * f64::from(p.m_r) * b * b * link_snr(i, j, r, p);
    if info > 0.0 {
        3.0 * p.speed_of_light_c.powi(2) * p.noise_sigma_s2 / info
    } else {
        f64::INFINITY
    }
}

fn aoa_sum(r: &NetworkRealization, beta: f64) -> Fim2 {
    let mut inner = Fim2::zero();
    let mut w_total = 0.0;
    for (&d, &theta) in r.distances.iter().zip(&r.bearings) {
        let w = pow_neg(d, beta);
        w_total += w;
        let (s, c) = theta.sin_cos();
        if c.abs() > COS_EPS {
            inner = inner + Fim2::outer(s, -c, c * c * w / (d * d));
        }
    }
    inner * w_total
}

fn tof_sum(r: &NetworkRealization, beta: f64) -> Fim2 {
    let mut inner = Fim2::zero();
    let (mut w_total, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (&d, &theta) in r.distances.iter().zip(&r.bearings) {
        let w = pow_neg(d, beta);
        let (s, c) = theta.sin_cos();
        w_total += w;
        sx += w * c;
        sy += w * s;
        inner = inner + Fim2::outer(c, s, w);
    }
    inner * (2.0 * w_total) + Fim2::outer(sx, sy, 2.0)
}

/// AOA Fisher information
/// `ζ_a² Σ_j d_j^{−β} Σ_i cos²θ_i d_i^{−β−2} [sin²θ_i, −sinθ_i cosθ_i; ·, cos²θ_i]`.
pub fn fim_aoa(r: &NetworkRealization, p: &SystemParams) -> Fim2 {
    aoa_sum(r, p.beta) * zeta_a_sq(p)
}

/// TOF Fisher information
/// `ζ_r² Σ_i Σ_j d_i^{−β} d_j^{−β} [a², ab; ab, b²]` with
/// `a = cosθ_i + cosθ_j` and `b = sinθ_i + sinθ_j`.
pub fn fim_tof(r: &NetworkRealization, p: &SystemParams) -> Fim2 {
    tof_sum(r, p.beta) * zeta_r_sq(p)
}

/// Sum of the AOA and TOF information (the two errors are independent).
pub fn fim_hybrid(r: &NetworkRealization, p: &SystemParams) -> Fim2 {
    fim_aoa(r, p) + fim_tof(r, p)
}

/// Fisher information of `mode`; `AoaOriented` falls back to its
/// geometry-only matrix.
pub fn fim(mode: SensingMode, r: &NetworkRealization, p: &SystemParams) -> Fim2 {
    match mode {
        SensingMode::Aoa => fim_aoa(r, p),
        SensingMode::Tof => fim_tof(r, p),
        SensingMode::Hybrid => fim_hybrid(r, p),
        SensingMode::AoaOriented => gdop_matrix(mode, r),
    }
}

/// Geometry-only information matrix: every station at unit distance and
/// unit gain. Distances in `r` are ignored.
pub fn gdop_matrix(mode: SensingMode, r: &NetworkRealization) -> Fim2 {
    let n = r.n() as f64;
    let aoa = |oriented: bool| {
        let mut f = Fim2::zero();
        for &theta in &r.bearings {
            let (s, c) = theta.sin_cos();
            let w = if oriented { 1.0 } else { c * c };
            f = f + Fim2::outer(s, -c, w);
        }
        f * n
    };
    let tof = || {
        let (mut f, mut sx, mut sy) = (Fim2::zero(), 0.0, 0.0);
        for &theta in &r.bearings {
            let (s, c) = theta.sin_cos();
            sx += c;
            sy += s;
            f = f + Fim2::outer(c, s, 1.0);
        }
        f * (2.0 * n) + Fim2::outer(sx, sy, 2.0)
    };
    match mode {
        SensingMode::Aoa => aoa(false),
        SensingMode::AoaOriented => aoa(true),
        SensingMode::Tof => tof(),
        SensingMode::Hybrid => aoa(false) + tof(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn params() -> SystemParams {
        SystemParams::baseline()
    }

    #[test]
    fn trace_inverse_small_cases() {
        assert!((trace_inverse(&Fim2::new(2.0, 0.0, 4.0)) - 0.75).abs() < 1e-15);
        assert_eq!(trace_inverse(&Fim2::new(1.0, 0.0, 1.0)), 2.0);
        assert_eq!(trace_inverse(&Fim2::zero()), f64::INFINITY);
        assert_eq!(trace_inverse(&Fim2::new(1.0, 1.0, 1.0)), f64::INFINITY);
    }

    #[test]
    fn unit_link_snr() {
        let mut p = params();
        p.rcs_sigma = 2.0;
        p.p_s = 0.5;
        p.p_c = 0.5;
        p.gamma_0 = 1.0;
        let r = NetworkRealization::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(link_snr(0, 0, &r, &p), 1.0);
        assert_eq!(link_snr(1, 0, &r, &p), 0.25);
    }

    #[test]
    fn variance_scalings() {
        let r = NetworkRealization::new(vec![10.0, 20.0], vec![0.3, FRAC_PI_2]).unwrap();
        let mut p = params();
        assert_eq!(aoa_variance(1, 0, &r, &p), f64::INFINITY);

        p.m_r = 2;
        let v2 = aoa_variance(0, 1, &r, &p);
        p.m_r = 10;
        let v10 = aoa_variance(0, 1, &r, &p);
        assert!((v2 / v10 - 165.0).abs() < 1e-9);

        let t1 = tof_variance(0, 1, &r, &p);
        p.bandwidth_b *= 2.0;
        let t2 = tof_variance(0, 1, &r, &p);
        assert!((t1.sqrt() / t2.sqrt() - 2.0).abs() < 1e-12);

        p.rcs_sigma *= 4.0;
        let t3 = tof_variance(0, 1, &r, &p);
        assert!((t2 / t3 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_station_aoa_is_rank_one() {
        let r = NetworkRealization::new(vec![30.0], vec![0.7]).unwrap();
        let f = fim_aoa(&r, &params());
        assert!(f.det().abs() <= 1e-12 * f.trace().powi(2));
        assert_eq!(trace_inverse(&f), f64::INFINITY);
    }

    #[test]
    fn orthogonal_pair_has_no_aoa_cross_term() {
        // One bearing at 0 and one at π/2 (whose cos² weight is zero).
        let r = NetworkRealization::new(vec![5.0, 5.0], vec![0.0, FRAC_PI_2]).unwrap();
        let f = fim_aoa(&r, &params());
        assert_eq!(f.f12, 0.0);
    }

    #[test]
    fn monostatic_tof_points_along_x() {
        let r = NetworkRealization::new(vec![1.0], vec![0.0]).unwrap();
        let mut p = params();
        p.beta = 2.0;
        let f = fim_tof(&r, &p) * (1.0 / zeta_r_sq(&p));
        assert!((f.f11 - 4.0).abs() < 1e-15);
        assert_eq!(f.f12, 0.0);
        assert_eq!(f.f22, 0.0);
    }

    #[test]
    fn opposed_pair_cross_terms_vanish() {
        let r = NetworkRealization::new(vec![2.0, 2.0], vec![0.0, PI]).unwrap();
        let p = params();
        // Only the two monostatic links contribute: 2 · (1/16) · 4 on f11.
        let f = fim_tof(&r, &p) * (1.0 / zeta_r_sq(&p));
        assert!((f.f11 - 0.5).abs() < 1e-15);
        assert!(f.f12.abs() < 1e-16);
        assert!(f.f22.abs() < 1e-15);
    }

    #[test]
    fn hybrid_is_the_exact_sum() {
        let r = NetworkRealization::new(vec![3.0, 7.0, 11.0], vec![0.1, 2.0, 4.0]).unwrap();
        let p = params();
        let (a, t, h) = (fim_aoa(&r, &p), fim_tof(&r, &p), fim_hybrid(&r, &p));
        assert_eq!(h, a + t);
    }

    #[test]
    fn no_sensing_power_gives_zero_information() {
        let mut p = params();
        p.p_s = 0.0;
        p.p_c = 1.0;
        let r = NetworkRealization::new(vec![3.0, 7.0], vec![0.1, 2.0]).unwrap();
        assert_eq!(fim_hybrid(&r, &p), Fim2::zero());
    }

    #[test]
    fn single_station_hybrid_closed_form() {
        let p = params();
        let (d, theta) = (40.0f64, 0.9f64);
        let r = NetworkRealization::new(vec![d], vec![theta]).unwrap();
        let got = trace_inverse(&fim_hybrid(&r, &p));
        let c2 = theta.cos().powi(2);
        let expected = d.powi(6) / (zeta_a_sq(&p) * c2) + d.powi(4) / (4.0 * zeta_r_sq(&p));
        assert!((got / expected - 1.0).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn gdop_identities() {
        let r = NetworkRealization::unit(vec![1.3]);
        assert!((gdop_matrix(SensingMode::AoaOriented, &r).trace() - 1.0).abs() < 1e-15);

        let bearings = vec![0.2, 1.1, 2.5, 4.0, 5.5];
        let r = NetworkRealization::unit(bearings.clone());
        let expected: f64 = 5.0 * bearings.iter().map(|t| t.cos().powi(2)).sum::<f64>();
        assert!((gdop_matrix(SensingMode::Aoa, &r).trace() - expected).abs() < 1e-12);

        let h = gdop_matrix(SensingMode::Hybrid, &r);
        let s = gdop_matrix(SensingMode::Aoa, &r) + gdop_matrix(SensingMode::Tof, &r);
        assert_eq!(h, s);
    }

    #[test]
    fn hybrid_gdop_entries_match_pairwise_definition() {
        let bearings = [0.4, 1.9, 3.3];
        let r = NetworkRealization::unit(bearings.to_vec());
        let mut f = Fim2::zero();
        for &ti in &bearings {
            for &tj in &bearings {
                let a = ti.cos() + tj.cos();
                let b = ti.sin() + tj.sin();
                let c = ti.sin() * ti.cos();
                let e = ti.cos().powi(2);
                f = f + Fim2::new(a * a + c * c, a * b - c * e, b * b + e * e);
            }
        }
        let g = gdop_matrix(SensingMode::Hybrid, &r);
        assert!((f.f11 - g.f11).abs() < 1e-12);
        assert!((f.f12 - g.f12).abs() < 1e-12);
        assert!((f.f22 - g.f22).abs() < 1e-12);
    }
}
