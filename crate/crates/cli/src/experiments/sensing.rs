use isac_core::boundary::{max_receive_antennas, point_params, PowerConstraint};
use isac_core::closed_forms::{
    crlb_closed, gdop_aoa_closed, gdop_aoa_oriented_closed, gdop_hybrid_closed, gdop_tof_closed, scaling_law_report,
};
use isac_core::params::to_per_km2;
use isac_core::sensing::{mc_expected_crlb, mc_expected_gdop};
use isac_core::{DeploymentSpec, Result, SensingMode};

use super::{cell_seed, modes, rel_error};
use crate::config::ExperimentConfig;
use crate::output::Table;
use crate::Outputs;

fn gdop_closed(mode: SensingMode, n: usize) -> f64 {
    match mode {
        SensingMode::Aoa => gdop_aoa_closed(n),
        SensingMode::AoaOriented => gdop_aoa_oriented_closed(n),
        SensingMode::Tof => gdop_tof_closed(n),
        SensingMode::Hybrid => gdop_hybrid_closed(n),
    }
}

/// GDoP against the cluster size, uniform bearings. Also writes the AOA to
/// oriented-AOA ratio when both modes run.
pub fn gdop_vs_n(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let ns = config.int_axis("n", || (2..=16).collect());
    let modes = modes(
        config,
        &[SensingMode::Aoa, SensingMode::AoaOriented, SensingMode::Tof, SensingMode::Hybrid],
    );
    let t = out.add(
        Table::new(
            "gdop_vs_n",
            &["n", "mode", "mean", "std_error", "closed_form", "rel_error", "singular_fraction"],
        )
        .with_plot("n", "mean", Some("mode"), true),
    );
    let ratio = (modes.contains(&SensingMode::Aoa) && modes.contains(&SensingMode::AoaOriented)).then(|| {
        out.add(Table::new(
            "orientation_ratio",
            &["n", "ratio_mc", "ratio_closed_form"],
        ))
    });
    for &n in &ns {
        let n = n as usize;
        let mut means = Vec::new();
        for &mode in &modes {
            let est = mc_expected_gdop(mode, n, config.trials, cell_seed(config, mode, n as u64))?;
            let closed = gdop_closed(mode, n);
            means.push((mode, est.mean()));
            out.tables[t].push(vec![
                n.into(),
                mode.name().into(),
                est.mean().into(),
                est.std_error().into(),
                closed.into(),
                rel_error(closed, est.mean()).into(),
                est.singular_fraction().into(),
            ]);
        }
        if let Some(r) = ratio {
            let get = |m| means.iter().find(|(k, _)| *k == m).map(|(_, v)| *v).unwrap_or(f64::NAN);
            let closed = gdop_aoa_closed(n) / gdop_aoa_oriented_closed(n);
            out.tables[r].push(vec![
                n.into(),
                (get(SensingMode::Aoa) / get(SensingMode::AoaOriented)).into(),
                closed.into(),
            ]);
        }
    }
    Ok(())
}

/// Fixed-N disk CRLB at the configured density against the closed forms
/// and the large-N constants.
pub fn crlb_scaling(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let p = config.system_params();
    let ns: Vec<usize> = config
        .int_axis("n", || vec![2, 4, 8, 16, 32, 64, 128, 256])
        .into_iter()
        .map(|n| n as usize)
        .collect();
    let t = out.add(
        Table::new(
            "crlb_scaling",
            &[
                "n",
                "mode",
                "mean",
                "std_error",
                "closed_form",
                "rel_error",
                "scaled_mean",
                "limit_constant",
                "singular_fraction",
            ],
        )
        .with_plot("n", "scaled_mean", Some("mode"), false),
    );
    for (k, &mode) in modes(config, &[SensingMode::Aoa, SensingMode::Tof, SensingMode::Hybrid]).iter().enumerate() {
        let report = scaling_law_report(mode, &ns, p.lambda_b, &p, config.trials, cell_seed(config, mode, k as u64))?;
        for (i, &n) in ns.iter().enumerate() {
            out.tables[t].push(vec![
                n.into(),
                mode.name().into(),
                report.mc_values[i].into(),
                report.mc_std_errors[i].into(),
                report.closed_values[i].into(),
                rel_error(report.closed_values[i], report.mc_values[i]).into(),
                report.scaled_mc[i].into(),
                report.limit_constant.into(),
                report.singular_fractions[i].into(),
            ]);
        }
    }
    Ok(())
}

fn constraint_name(c: PowerConstraint) -> &'static str {
    match c {
        PowerConstraint::PerStation => "P",
        PowerConstraint::PerAntenna => "M_t*P",
    }
}

/// CRLB against the station density `λ_b = λ_t / m_t` with fixed antenna
/// budgets, under both total-power constraints.
pub fn crlb_vs_density(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let base = config.system_params();
    let m_ts = config.int_axis("m_t", || (1..=16).collect());
    let constraints = config
        .options
        .power_constraints
        .clone()
        .unwrap_or_else(|| vec![PowerConstraint::PerStation, PowerConstraint::PerAntenna]);
    let modes = modes(config, &[SensingMode::Aoa, SensingMode::Tof, SensingMode::Hybrid]);
    let t = out.add(
        Table::new(
            "crlb_vs_density",
            &[
                "m_t",
                "lambda_b_per_km2",
                "m_r",
                "n",
                "power_constraint",
                "mode",
                "mean",
                "std_error",
                "closed_form",
                "singular_fraction",
            ],
        )
        .with_plot("lambda_b_per_km2", "mean", Some("mode"), true),
    );
    let s = out.add(Table::new(
        "density_optima",
        &["power_constraint", "mode", "best_m_t", "best_lambda_b_per_km2", "best_mean"],
    ));
    for &constraint in &constraints {
        for &mode in &modes {
            let mut best: Option<(u32, f64, f64)> = None;
            for &m_t in &m_ts {
                let m_r = max_receive_antennas(m_t, &base);
                let p = point_params(m_t, m_r, base.p_c, &base, constraint);
                let n = p.fixed_cluster_size();
                if m_r == 0 || n == 0 {
                    continue;
                }
                let spec = DeploymentSpec::fixed_for_density(p.lambda_b, p.coop_radius_d);
                let est = mc_expected_crlb(mode, &spec, &p, config.trials, cell_seed(config, mode, u64::from(m_t)))?;
                let mean = est.mean();
                if mean.is_finite() && best.is_none_or(|b| mean < b.2) {
                    best = Some((m_t, p.lambda_b, mean));
                }
                out.tables[t].push(vec![
                    m_t.into(),
                    to_per_km2(p.lambda_b).into(),
                    m_r.into(),
                    n.into(),
                    constraint_name(constraint).into(),
                    mode.name().into(),
                    mean.into(),
                    est.std_error().into(),
                    crlb_closed(mode, n, p.lambda_b, &p).into(),
                    est.singular_fraction().into(),
                ]);
            }
            if let Some((m_t, lambda_b, mean)) = best {
                out.tables[s].push(vec![
                    constraint_name(constraint).into(),
                    mode.name().into(),
                    m_t.into(),
                    to_per_km2(lambda_b).into(),
                    mean.into(),
                ]);
            }
        }
    }
    Ok(())
}
