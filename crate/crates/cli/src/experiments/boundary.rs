use isac_core::boundary::{
    pareto_frontier, single_objective_optima, AllocationGrid, CrlbMethod, FrontierOptions, PowerConstraint,
};
use isac_core::params::to_per_km2;
use isac_core::rng::derive_seed;
use isac_core::{OperatingPoint, Result, SensingMode};

use super::modes;
use crate::config::{CrlbMethodName, ExperimentConfig};
use crate::output::{Cell, Table};
use crate::Outputs;

fn method_name(m: CrlbMethod) -> &'static str {
    match m {
        CrlbMethod::ClosedForm => "closed_form",
        CrlbMethod::MonteCarlo { .. } => "monte_carlo",
    }
}

fn point_row(mode: SensingMode, p: &OperatingPoint) -> Vec<Cell> {
    vec![
        mode.name().into(),
        p.m_t.into(),
        p.m_r.into(),
        to_per_km2(p.lambda_b).into(),
        p.p_c.into(),
        p.p_s.into(),
        p.rate.into(),
        p.crlb.into(),
        method_name(p.crlb_method).into(),
    ]
}

const POINT_COLUMNS: [&str; 9] = [
    "mode",
    "m_t",
    "m_r",
    "lambda_b_per_km2",
    "p_c",
    "p_s",
    "rate_bits",
    "crlb",
    "crlb_method",
];

/// Rate-CRLB frontier over `(m_t, p_c)` for each sensing mode, the
/// single-objective optima, and the CRLB of each mode at a reference rate.
pub fn boundary(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let params = config.system_params();
    let m_ts = config.int_axis("m_t", || (1..=12).collect());
    let grid = match config.axis("p_c") {
        Some(p_c) => AllocationGrid::new(m_ts, p_c.to_vec()),
        None => AllocationGrid::uniform_power(m_ts, 10),
    };
    let method = match config.options.crlb_method.unwrap_or_default() {
        CrlbMethodName::ClosedForm => CrlbMethod::ClosedForm,
        CrlbMethodName::MonteCarlo => CrlbMethod::MonteCarlo {
            trials: config.trials,
            seed: derive_seed(config.seed, 0),
        },
    };
    let options = FrontierOptions {
        method,
        power: config
            .options
            .power_constraints
            .as_ref()
            .and_then(|c| c.first().copied())
            .unwrap_or(PowerConstraint::PerAntenna),
        prune: config.options.prune.unwrap_or(true),
    };
    let mut columns = POINT_COLUMNS.to_vec();
    columns.push("on_frontier");
    let points_t = out.add(Table::new("boundary_points", &columns));
    let mut frontier_columns = POINT_COLUMNS.to_vec();
    frontier_columns.insert(1, "rank");
    let frontier_t = out.add(
        Table::new("frontier", &frontier_columns).with_plot("rate_bits", "crlb", Some("mode"), true),
    );
    let optima_t = out.add(Table::new(
        "single_objective_optima",
        &["mode", "m_t_comm", "lambda_b_comm_per_km2", "m_t_sens", "lambda_b_sens_per_km2"],
    ));
    let report_rate = config.options.report_rate_bits.unwrap_or(6.0);
    let summary_t = out.add(Table::new(
        "frontier_at_rate",
        &["report_rate_bits", "mode", "best_crlb", "ratio_to_hybrid"],
    ));
    let mut best = Vec::new();
    for mode in modes(config, &[SensingMode::Aoa, SensingMode::Tof, SensingMode::Hybrid]) {
        let search = pareto_frontier(&grid, &params, mode, &options)?;
        for p in &search.evaluated {
            let mut row = point_row(mode, p);
            row.push(search.frontier.points.contains(p).into());
            out.tables[points_t].push(row);
        }
        for (rank, p) in search.frontier.points.iter().enumerate() {
            let mut row = point_row(mode, p);
            row.insert(1, rank.into());
            out.tables[frontier_t].push(row);
        }
        let opt = single_objective_optima(&grid.m_t, &params, mode, &options)?;
        out.tables[optima_t].push(vec![
            mode.name().into(),
            opt.m_t_comm.into(),
            to_per_km2(opt.lambda_b_comm).into(),
            opt.m_t_sens.into(),
            to_per_km2(opt.lambda_b_sens).into(),
        ]);
        best.push((mode, search.frontier.best_crlb_at(report_rate).unwrap_or(f64::INFINITY)));
    }
    let hybrid = best
        .iter()
        .find(|b| b.0 == SensingMode::Hybrid)
        .map_or(f64::NAN, |b| b.1);
    for (mode, crlb) in best {
        out.tables[summary_t].push(vec![
            report_rate.into(),
            mode.name().into(),
            crlb.into(),
            (crlb / hybrid).into(),
        ]);
    }
    Ok(())
}
