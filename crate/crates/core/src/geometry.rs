//! Base-station deployments around the typical target at the origin.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;

/// Guard radius applied by default around the origin, m.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentMode {
    /// Poisson number of stations in the annulus.
    Ppp,
    /// Exactly `n_override` stations in the annulus.
    FixedN,
}

/// How a cooperating cluster is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentSpec {
    pub mode: DeploymentMode,
    /// Station density, m⁻².
    pub lambda_b: f64,
    pub coop_radius_d: f64,
    pub n_override: Option<usize>,
    pub exclusion_radius: f64,
}

impl DeploymentSpec {
    pub fn ppp(lambda_b: f64, coop_radius_d: f64) -> Self {
        Self {
            mode: DeploymentMode::Ppp,
            lambda_b,
            coop_radius_d,
            n_override: None,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    pub fn fixed_n(n: usize, lambda_b: f64, coop_radius_d: f64) -> Self {
        Self {
            mode: DeploymentMode::FixedN,
            lambda_b,
            coop_radius_d,
            n_override: Some(n),
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    /// Fixed cluster of `n` stations on the disk that holds `n` stations on
    /// average at density `lambda_b`, i.e. `D = sqrt(n / (λ_b π))`.
    pub fn fixed_n_at_density(n: usize, lambda_b: f64) -> Self {
        let d = (n as f64 / (lambda_b * PI)).sqrt();
        Self::fixed_n(n, lambda_b, d)
    }

    /// Fixed cluster of `round(λ_b π D²)` stations.
    pub fn fixed_for_density(lambda_b: f64, coop_radius_d: f64) -> Self {
        let n = (lambda_b * PI * coop_radius_d * coop_radius_d).round() as usize;
        Self::fixed_n(n, lambda_b, coop_radius_d)
    }

    pub fn with_exclusion(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.coop_radius_d > 0.0 && self.coop_radius_d.is_finite()) {
            return bad(format!("coop_radius_d = {} must be positive", self.coop_radius_d));
        }
        if !(self.exclusion_radius >= 0.0 && self.exclusion_radius < self.coop_radius_d) {
            return bad(format!(
                "exclusion_radius = {} must lie in [0, coop_radius_d)",
                self.exclusion_radius
            ));
        }
        match self.mode {
            DeploymentMode::Ppp => {
                if !(self.lambda_b > 0.0 && self.lambda_b.is_finite()) {
                    return bad(format!("lambda_b = {} must be positive", self.lambda_b));
                }
            }
            DeploymentMode::FixedN => {
                if !matches!(self.n_override, Some(n) if n >= 1) {
                    return bad("fixed_n deployment needs n_override >= 1".into());
                }
            }
        }
        Ok(())
    }

    /// Draws one realization. The spec is assumed valid.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NetworkRealization {
        let (r2_lo, r2_hi) = (
            self.exclusion_radius * self.exclusion_radius,
            self.coop_radius_d * self.coop_radius_d,
        );
        let n = match self.mode {
            DeploymentMode::FixedN => self.n_override.unwrap_or(0),
            DeploymentMode::Ppp => poisson_count(rng, self.lambda_b * PI * (r2_hi - r2_lo)),
        };
        let mut distances = Vec::with_capacity(n);
        let mut bearings = Vec::with_capacity(n);
        for _ in 0..n {
            distances.push(uniform_radius_sq(rng, r2_lo, r2_hi).sqrt());
            bearings.push(rng.random::<f64>() * TAU);
        }
        NetworkRealization { distances, bearings }
    }
}

/// Polar coordinates of the cooperating stations seen from the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub distances: Vec<f64>,
    pub bearings: Vec<f64>,
}

impl NetworkRealization {
    pub fn new(distances: Vec<f64>, bearings: Vec<f64>) -> Result<Self> {
        if distances.len() != bearings.len() {
            return Err(Error::InvalidParams(format!(
                "{} distances but {} bearings",
                distances.len(),
                bearings.len()
            )));
        }
        if let Some(d) = distances.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidParams(format!("distance {d} is not positive")));
        }
        Ok(Self { distances, bearings })
    }

    /// Stations at unit distance with the given bearings.
    pub fn unit(bearings: Vec<f64>) -> Self {
        Self {
            distances: vec![1.0; bearings.len()],
            bearings,
        }
    }

    pub fn n(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Distance of the `k`-th closest station (1-based).
    pub fn nth_nearest(&self, k: usize) -> Option<f64> {
        if k == 0 || k > self.n() {
            return None;
        }
        let mut d = self.distances.clone();
        let (_, kth, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
        Some(*kth)
    }
}

/// Draws a realization from stream 0 of `rng_seed`.
pub fn sample_realization(spec: &DeploymentSpec, rng_seed: u64) -> Result<NetworkRealization> {
    spec.validate()?;
    Ok(spec.sample(&mut substream(rng_seed, 0)))
}

/// Poisson draw that accepts a zero mean.
pub fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    let draw: f64 = dist.sample(rng);
    draw as usize
}

/// Squared radius of a point uniform on the annulus `r² ∈ [r2_lo, r2_hi]`.
pub fn uniform_radius_sq<R: Rng + ?Sized>(rng: &mut R, r2_lo: f64, r2_hi: f64) -> f64 {
    r2_lo + rng.random::<f64>() * (r2_hi - r2_lo)
}

/// Which expression of the mean n-th nearest distance to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceForm {
    /// `Γ(n + ½) / (√(λπ) Γ(n))`.
    Exact,
    /// `√(n / (λπ))`.
    Approximate,
}

/// Mean distance from the origin to the `n`-th nearest point of a PPP.
pub fn nth_nearest_mean_distance(n: usize, lambda_b: f64, form: DistanceForm) -> f64 {
    let nf = n as f64;
    match form {
        DistanceForm::Exact => {
            use statrs::function::gamma::ln_gamma;
            (ln_gamma(nf + 0.5) - ln_gamma(nf)).exp() / (lambda_b * PI).sqrt()
        }
        DistanceForm::Approximate => (nf / (lambda_b * PI)).sqrt(),
    }
}

/// Density of the nearest-station distance, `2πλ r e^{−πλr²}`.
pub fn nearest_distance_pdf(r: f64, lambda_b: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda_b * r * (-PI * lambda_b * r * r).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run_trials, Trial};
    use crate::special::{integrate_semi_infinite, QuadratureSpec};

    #[test]
    fn fixed_n_respects_the_annulus() {
        let spec = DeploymentSpec::fixed_n(5, 1e-5, 300.0).with_exclusion(10.0);
        let r = sample_realization(&spec, 9).unwrap();
        assert_eq!(r.n(), 5);
        assert!(r.distances.iter().all(|d| (10.0..=300.0).contains(d)));
        assert!(r.bearings.iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn same_seed_same_realization() {
        let spec = DeploymentSpec::ppp(1e-4, 500.0);
        assert_eq!(sample_realization(&spec, 4).unwrap(), sample_realization(&spec, 4).unwrap());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(DeploymentSpec::fixed_n(0, 1.0, 10.0).validate().is_err());
        assert!(DeploymentSpec::ppp(1.0, 10.0).with_exclusion(10.0).validate().is_err());
        assert!(DeploymentSpec::ppp(0.0, 10.0).validate().is_err());
    }

    #[test]
    fn exact_mean_distances() {
        assert!((nth_nearest_mean_distance(1, 1.0, DistanceForm::Exact) - 0.5).abs() < 1e-14);
        assert!((nth_nearest_mean_distance(2, 1.0, DistanceForm::Exact) - 0.75).abs() < 1e-14);
        let approx = nth_nearest_mean_distance(4, 1.0 / PI, DistanceForm::Approximate);
        assert!((approx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pdf_normalization_and_mode() {
        let lambda = 3e-4;
        assert_eq!(nearest_distance_pdf(0.0, lambda), 0.0);
        let total = integrate_semi_infinite(|r| nearest_distance_pdf(r, lambda), &QuadratureSpec::default())
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-9);
        let mode = 1.0 / (2.0 * PI * lambda).sqrt();
        let h = mode * 1e-4;
        assert!(nearest_distance_pdf(mode, lambda) > nearest_distance_pdf(mode - h, lambda));
        assert!(nearest_distance_pdf(mode, lambda) > nearest_distance_pdf(mode + h, lambda));
    }

    #[test]
    fn poisson_count_mean_and_variance() {
        // λπ(D² − r_ex²) = 10 with the guard removed.
        let spec = DeploymentSpec::ppp(10.0 / (PI * 100.0 * 100.0), 100.0).with_exclusion(0.0);
        let t = run_trials(100_000, 21, |rng| Trial::Value(spec.sample(rng).n() as f64));
        assert!((t.mean - 10.0).abs() < 0.1, "mean {}", t.mean);
        let var = t.m2 / (t.count as f64 - 1.0);
        assert!((var / t.mean - 1.0).abs() < 0.03, "variance {var}");
    }

    #[test]
    fn radial_cdf_ks_distance() {
        let spec = DeploymentSpec::fixed_n(1, 1e-4, 200.0).with_exclusion(1.0);
        let mut d: Vec<f64> = (0..100_000)
            .map(|t| spec.sample(&mut substream(5, t)).distances[0])
            .collect();
        d.sort_by(f64::total_cmp);
        let cdf = |r: f64| (r * r - 1.0) / (200.0 * 200.0 - 1.0);
        let n = d.len() as f64;
        let ks = d
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = cdf(r);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn bearings_are_isotropic() {
        let spec = DeploymentSpec::fixed_n(1, 1e-4, 200.0);
        let mut bins = [0u32; 16];
        for t in 0..100_000 {
            let theta = spec.sample(&mut substream(8, t)).bearings[0];
            bins[((theta / TAU) * 16.0) as usize] += 1;
        }
        let expected = 100_000.0 / 16.0;
        let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-square with 15 degrees of freedom.
        assert!(chi2 < 37.70, "chi-square {chi2}");
    }
}
