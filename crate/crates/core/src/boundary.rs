//! Rate versus CRLB trade-off over antenna allocation and power split.
//!
//! A point of the grid fixes the transmit antennas per station `m_t`
//! (hence `λ_b = λ_t / m_t`) and the communication share `p_c`; sensing
//! gets `p_s = 1 − p_c`. Receive antennas are spread over the same stations,
//! `m_r = ⌊λ_r / λ_b⌋`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::crlb_closed;
use crate::comms::{argmax_first, closed_form_rate};
use crate::error::{Error, Result};
use crate::geometry::DeploymentSpec;
use crate::params::SystemParams;
use crate::sensing::mc_expected_crlb;
use crate::sensing::SensingMode;

/// Relative slack on the density budgets, absorbing `λ_t / m_t` round-off.
const BUDGET_RTOL: f64 = 1e-9;

/// How transmit power scales with the antennas of a station.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerConstraint {
    /// Total power `P` per station regardless of `m_t`.
    PerStation,
    /// Power `P` per antenna, so a station radiates `m_t · P`.
    #[default]
    PerAntenna,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CrlbMethod {
    ClosedForm,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub m_t: u32,
    pub m_r: u32,
    /// Stations per m².
    pub lambda_b: f64,
    pub p_c: f64,
    pub p_s: f64,
    /// Bits per channel use.
    pub rate: f64,
    /// m².
    pub crlb: f64,
    pub sensing_mode: SensingMode,
    pub crlb_method: CrlbMethod,
}

impl OperatingPoint {
    /// At least as good in both objectives and strictly better in one.
    pub fn dominates(&self, other: &OperatingPoint) -> bool {
        self.rate >= other.rate
            && self.crlb <= other.crlb
            && (self.rate > other.rate || self.crlb < other.crlb)
    }
}

/// Non-dominated points sorted by rate ascending. Along the frontier a
/// higher rate always costs localization accuracy, so the CRLB strictly
/// increases with the rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFrontier {
    pub points: Vec<OperatingPoint>,
}

impl ParetoFrontier {
    /// Reduces candidates to their non-dominated subset. Points with a
    /// non-finite CRLB or rate never enter. Identical objective pairs keep
    /// the earliest candidate.
    pub fn from_points(candidates: &[OperatingPoint]) -> Self {
        let mut order: Vec<usize> = (0..candidates.len())
            .filter(|&i| candidates[i].crlb.is_finite() && candidates[i].rate.is_finite())
            .collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (&candidates[a], &candidates[b]);
            pb.rate
                .total_cmp(&pa.rate)
                .then(pa.crlb.total_cmp(&pb.crlb))
                .then(a.cmp(&b))
        });
        let mut points = Vec::new();
        let mut best = f64::INFINITY;
        for i in order {
            if candidates[i].crlb < best {
                best = candidates[i].crlb;
                points.push(candidates[i]);
            }
        }
        points.reverse();
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest CRLB among frontier points with rate at least `rate`.
    pub fn best_crlb_at(&self, rate: f64) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.rate >= rate)
            .map(|p| p.crlb)
            .min_by(f64::total_cmp)
    }
}

/// Parameters of one grid point: `λ_b = λ_t / m_t`, the requested power
/// split and the transmit gain of the power constraint.
pub fn point_params(m_t: u32, m_r: u32, p_c: f64, params: &SystemParams, power: PowerConstraint) -> SystemParams {
    let mut p = params.clone().with_m_t(m_t).with_power_split(p_c);
    p.m_r = m_r;
    if power == PowerConstraint::PerAntenna {
        p.g_t = params.g_t * f64::from(m_t);
    }
    p
}

/// Receive antennas per station when all of `λ_r` is used.
pub fn max_receive_antennas(m_t: u32, params: &SystemParams) -> u32 {
    let lambda_b = params.lambda_t / f64::from(m_t);
    (params.lambda_r / lambda_b * (1.0 + BUDGET_RTOL)).floor() as u32
}

fn check_feasible(m_t: u32, m_r: u32, p_c: f64, params: &SystemParams) -> Result<()> {
    if m_t == 0 || m_r == 0 {
        return Err(Error::Infeasible(format!("m_t = {m_t} and m_r = {m_r} must be positive")));
    }
    if !(0.0..=1.0).contains(&p_c) {
        return Err(Error::Infeasible(format!("p_c = {p_c} outside [0, 1]")));
    }
    let lambda_b = params.lambda_t / f64::from(m_t);
    if f64::from(m_r) * lambda_b > params.lambda_r * (1.0 + BUDGET_RTOL) {
        return Err(Error::Infeasible(format!(
            "m_r * lambda_b = {} exceeds lambda_r = {}",
            f64::from(m_r) * lambda_b,
            params.lambda_r
        )));
    }
    Ok(())
}

/// CRLB of a fully specified point (`params` already carries `λ_b`, `p_s`
/// and the gains).
fn point_crlb(mode: SensingMode, p: &SystemParams, method: CrlbMethod) -> Result<f64> {
    if mode == SensingMode::AoaOriented {
        return Err(Error::InvalidParams("aoa_oriented has no CRLB".into()));
    }
    if p.p_s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    match method {
        CrlbMethod::ClosedForm => Ok(crlb_closed(mode, p.fixed_cluster_size(), p.lambda_b, p)),
        CrlbMethod::MonteCarlo { trials, seed } => {
            let spec = DeploymentSpec::fixed_for_density(p.lambda_b, p.coop_radius_d);
            if spec.n_override == Some(0) {
                return Ok(f64::INFINITY);
            }
            let est = mc_expected_crlb(mode, &spec, p, trials, seed)?;
            Ok(est.estimate.map_or(f64::INFINITY, |e| e.mean))
        }
    }
}

/// Rate and CRLB of one allocation.
///
/// `p_c = 1` leaves no sensing power (CRLB `+∞`); `p_c = 0` gives zero rate.
pub fn evaluate_point(
    m_t: u32,
    m_r: u32,
    p_c: f64,
    params: &SystemParams,
    mode: SensingMode,
    method: CrlbMethod,
    power: PowerConstraint,
) -> Result<OperatingPoint> {
    check_feasible(m_t, m_r, p_c, params)?;
    let p = point_params(m_t, m_r, p_c, params, power);
    let rate = closed_form_rate(&p)?.rate_bits;
    let crlb = point_crlb(mode, &p, method)?;
    Ok(OperatingPoint {
        m_t,
        m_r,
        lambda_b: p.lambda_b,
        p_c,
        p_s: p.p_s,
        rate,
        crlb,
        sensing_mode: mode,
        crlb_method: method,
    })
}

/// Search grid over transmit antennas and communication share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationGrid {
    pub m_t: Vec<u32>,
    pub p_c: Vec<f64>,
}

impl AllocationGrid {
    pub fn new(mut m_t: Vec<u32>, p_c: Vec<f64>) -> Self {
        m_t.sort_unstable();
        m_t.dedup();
        Self { m_t, p_c }
    }

    /// `p_c ∈ {0, 1/(k−1), …, 1}`.
    pub fn uniform_power(m_t: Vec<u32>, k: usize) -> Self {
        let p_c = (0..k).map(|i| i as f64 / (k.max(2) - 1) as f64).collect();
        Self::new(m_t, p_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierOptions {
    pub method: CrlbMethod,
    pub power: PowerConstraint,
    /// Restrict `m_t` to the range between the communication-only and the
    /// sensing-only optima.
    pub prune: bool,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        Self {
            method: CrlbMethod::ClosedForm,
            power: PowerConstraint::default(),
            prune: false,
        }
    }
}

/// Result of a frontier search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierSearch {
    pub frontier: ParetoFrontier,
    /// Every evaluated grid point, in grid order.
    pub evaluated: Vec<OperatingPoint>,
    /// `m_t` values that survived pruning.
    pub m_t_searched: Vec<u32>,
}

/// Best `m_t` for each single objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleObjectiveOptima {
    /// Highest rate with `p_c = 1`.
    pub m_t_comm: u32,
    pub lambda_b_comm: f64,
    /// Lowest CRLB with `p_s = 1`.
    pub m_t_sens: u32,
    pub lambda_b_sens: f64,
}

fn feasible_m_t(m_t: &[u32], params: &SystemParams) -> Vec<u32> {
    m_t.iter()
        .copied()
        .filter(|&m| m > 0 && max_receive_antennas(m, params) >= 1)
        .collect()
}

/// Communication-only and sensing-only optima over `m_t_grid` (ties go to
/// the smaller `m_t`).
pub fn single_objective_optima(
    m_t_grid: &[u32],
    params: &SystemParams,
    mode: SensingMode,
    options: &FrontierOptions,
) -> Result<SingleObjectiveOptima> {
    let grid = feasible_m_t(m_t_grid, params);
    if grid.is_empty() {
        return Err(Error::Infeasible("no feasible m_t in the grid".into()));
    }
    let comm = grid
        .par_iter()
        .map(|&m| evaluate_point(m, max_receive_antennas(m, params), 1.0, params, mode, options.method, options.power))
        .collect::<Result<Vec<_>>>()?;
    let sens = grid
        .par_iter()
        .map(|&m| evaluate_point(m, max_receive_antennas(m, params), 0.0, params, mode, options.method, options.power))
        .collect::<Result<Vec<_>>>()?;
    let rates: Vec<f64> = comm.iter().map(|p| p.rate).collect();
    let neg_crlb: Vec<f64> = sens.iter().map(|p| -p.crlb).collect();
    let ic = argmax_first(&rates).expect("nonempty");
    let is = argmax_first(&neg_crlb).expect("nonempty");
    Ok(SingleObjectiveOptima {
        m_t_comm: grid[ic],
        lambda_b_comm: params.lambda_t / f64::from(grid[ic]),
        m_t_sens: grid[is],
        lambda_b_sens: params.lambda_t / f64::from(grid[is]),
    })
}

/// Non-dominated (rate, CRLB) points of the grid.
///
/// Infeasible `m_t` (no receive antenna fits) are skipped. Grid points are
/// evaluated in parallel; the reduction is sequential and deterministic.
pub fn pareto_frontier(
    grid: &AllocationGrid,
    params: &SystemParams,
    mode: SensingMode,
    options: &FrontierOptions,
) -> Result<FrontierSearch> {
    let m_t = feasible_m_t(&grid.m_t, params);
    if m_t.is_empty() || grid.p_c.is_empty() {
        return Err(Error::Infeasible("empty feasible grid".into()));
    }
    let cells: Vec<(u32, f64)> = if options.prune {
        pruned_cells(&m_t, &grid.p_c, params, mode, options)?
    } else {
        m_t.iter()
            .flat_map(|&m| grid.p_c.iter().map(move |&p| (m, p)))
            .collect()
    };
    let evaluated = cells
        .par_iter()
        .map(|&(m, p_c)| {
            evaluate_point(m, max_receive_antennas(m, params), p_c, params, mode, options.method, options.power)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m_t_searched: Vec<u32> = cells.iter().map(|c| c.0).collect();
    m_t_searched.sort_unstable();
    m_t_searched.dedup();
    Ok(FrontierSearch {
        frontier: ParetoFrontier::from_points(&evaluated),
        evaluated,
        m_t_searched,
    })
}

/// Grid cells that can reach the frontier.
///
/// The CRLB scales as `1/p_s`, so its profile over `m_t` is computed once
/// and its minimizer `m_s` serves every power level. For each `p_c` the
/// rate is climbed from `m_s` to its maximizer `m_c`. Cells between the two
/// are kept. Beyond `m_s` both objectives are worse than at `m_s`. Beyond
/// `m_c` the rate is lower than at `m_c`, so only cells with a CRLB below
/// that of `m_c` are kept. A rate profile found not to be unimodal falls
/// back to the whole row.
fn pruned_cells(
    m_t: &[u32],
    p_c: &[f64],
    params: &SystemParams,
    mode: SensingMode,
    options: &FrontierOptions,
) -> Result<Vec<(u32, f64)>> {
    let sens = m_t
        .par_iter()
        .map(|&m| {
            let p = point_params(m, max_receive_antennas(m, params), 0.0, params, options.power);
            point_crlb(mode, &p, options.method)
        })
        .collect::<Result<Vec<_>>>()?;
    let neg: Vec<f64> = sens.iter().map(|c| -c).collect();
    let is = argmax_first(&neg).expect("nonempty");
    let rows = p_c
        .par_iter()
        .map(|&pc| -> Result<Vec<(u32, f64)>> {
            let rate = |i: usize| -> Result<f64> {
                let m = m_t[i];
                let p = point_params(m, max_receive_antennas(m, params), pc, params, options.power);
                Ok(closed_form_rate(&p)?.rate_bits)
            };
            let all = || m_t.iter().map(|&m| (m, pc)).collect();
            let here = rate(is)?;
            let left = if is > 0 { rate(is - 1)? } else { f64::NEG_INFINITY };
            let right = if is + 1 < m_t.len() { rate(is + 1)? } else { f64::NEG_INFINITY };
            if left > here && right > here {
                return Ok(all());
            }
            let step: isize = if right > here { 1 } else if left > here { -1 } else { 0 };
            let mut ic = is;
            let mut best = here;
            if step != 0 {
                loop {
                    let next = ic as isize + step;
                    if next < 0 || next as usize >= m_t.len() {
                        break;
                    }
                    let r = rate(next as usize)?;
                    if r > best {
                        best = r;
                        ic = next as usize;
                    } else {
                        break;
                    }
                }
            }
            // Walking on past m_c the rate must keep falling.
            let beyond: Vec<usize> = if step >= 0 {
                (ic + 1..m_t.len()).collect()
            } else {
                (0..ic).rev().collect()
            };
            let mut prev = best;
            let mut keep_beyond = Vec::new();
            for &i in &beyond {
                if sens[i] < sens[ic] {
                    let r = rate(i)?;
                    if r >= prev {
                        return Ok(all());
                    }
                    prev = r;
                    keep_beyond.push(i);
                }
            }
            let (lo, hi) = (is.min(ic), is.max(ic));
            let mut keep: Vec<usize> = (lo..=hi).chain(keep_beyond).collect();
            keep.sort_unstable();
            Ok(keep.into_iter().map(|i| (m_t[i], pc)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    // Grid order: m_t major, p_c minor.
    let mut cells: Vec<(usize, usize, u32, f64)> = rows
        .into_iter()
        .enumerate()
        .flat_map(|(j, row)| {
            row.into_iter()
                .map(move |(m, pc)| (m_t.iter().position(|&x| x == m).expect("grid value"), j, m, pc))
        })
        .collect();
    cells.sort_unstable_by_key(|c| (c.0, c.1));
    Ok(cells.into_iter().map(|c| (c.2, c.3)).collect())
}

/// Largest `m_t` for which the receive budget still leaves one antenna per
/// station and at least two stations share the disk.
pub fn max_useful_m_t(params: &SystemParams) -> u32 {
    (params.lambda_t * PI * params.coop_radius_d.powi(2) / 2.0).floor().max(1.0) as u32
}
