use std::f64::consts::{LN_2, PI};

use isac_core::comms::{
    allocation_regime, closed_form_rate, default_epsilon, mc_rate, mean_sir_rate, rate_argmax, rate_curve, Regime,
};
use isac_core::params::to_per_km2;
use isac_core::rng::derive_seed;
use isac_core::Result;

use super::rel_error;
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::Outputs;

/// Cooperative rate against the transmit antennas per station, for each
/// cooperation radius.
pub fn rate_vs_mt(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let base = config.system_params();
    let m_ts = config.int_axis("m_t", || (2..=16).collect());
    let ds = config
        .axis("coop_radius_d")
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| vec![100.0, 125.0, 150.0]);
    let with_mc = config.options.mc_rate.unwrap_or(true);
    let t = out.add(
        Table::new(
            "rate_vs_mt",
            &[
                "coop_radius_d",
                "m_t",
                "lambda_b_per_km2",
                "rate_closed_bits",
                "rate_mc_bits",
                "std_error_bits",
                "rel_error",
                "mean_sir_bits",
                "empty_fraction",
                "tail_fraction",
            ],
        )
        .with_plot("m_t", "rate_closed_bits", Some("coop_radius_d"), false),
    );
    let s = out.add(Table::new(
        "rate_argmax",
        &["coop_radius_d", "argmax_m_t_closed", "argmax_m_t_mc"],
    ));
    for (i, &d) in ds.iter().enumerate() {
        let mut p_d = base.clone();
        p_d.coop_radius_d = d;
        let mut best_mc: Option<(u32, f64)> = None;
        let mut closed_curve = Vec::new();
        for &m_t in &m_ts {
            let p = p_d.clone().with_m_t(m_t);
            let closed = closed_form_rate(&p)?;
            let approx = mean_sir_rate(&p)?;
            let (mc, se, empty, tail) = if with_mc {
                let seed = derive_seed(config.seed, (i as u64) << 32 | u64::from(m_t));
                let r = mc_rate(&p, None, config.trials, seed)?;
                let empty = r.empty_trials as f64 / r.estimate.trials as f64;
                (r.estimate.mean / LN_2, r.estimate.std_error / LN_2, empty, r.tail_fraction)
            } else {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            };
            if mc.is_finite() && best_mc.is_none_or(|b| mc > b.1) {
                best_mc = Some((m_t, mc));
            }
            closed_curve.push((m_t, closed.clone()));
            out.tables[t].push(vec![
                d.into(),
                m_t.into(),
                to_per_km2(p.lambda_b).into(),
                closed.rate_bits.into(),
                mc.into(),
                se.into(),
                rel_error(closed.rate_bits, mc).into(),
                approx.rate_bits.into(),
                empty.into(),
                tail.into(),
            ]);
        }
        out.tables[s].push(vec![
            d.into(),
            Cell::Int(rate_argmax(&closed_curve).map_or(0, i64::from)),
            Cell::Int(best_mc.map_or(0, |b| i64::from(b.0))),
        ]);
    }
    Ok(())
}

fn regime_name(r: Regime) -> String {
    match r {
        Regime::Centralized => "centralized".into(),
        Regime::Distributed => "distributed".into(),
        Regime::Interior(m) => format!("interior({m})"),
    }
}

/// `G(M_t)` and the closed-form rate over the antenna grid for each path
/// loss exponent, with the optimum of each and its sensitivity to `ε`.
pub fn alloc_vs_alpha(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let base = config.system_params();
    let alphas = config
        .axis("alpha")
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| vec![2.1, 3.0, 4.0, 6.0, 8.0]);
    let full = base.lambda_t * PI * base.coop_radius_d.powi(2);
    let m_ts = config.int_axis("m_t", || (1..=(full.floor() as u32).max(1)).collect());
    let eps = config.options.epsilon.unwrap_or_else(|| default_epsilon(&base));
    let curve_t = out.add(
        Table::new("alloc_curve", &["alpha", "m_t", "lambda_b_per_km2", "g_value", "rate_bits"])
            .with_plot("m_t", "g_value", Some("alpha"), false),
    );
    let summary_t = out.add(Table::new(
        "alloc_summary",
        &[
            "alpha",
            "epsilon",
            "g_argmax_m_t",
            "regime",
            "g_argmax_m_t_eps_x10",
            "g_argmax_m_t_eps_div10",
            "rate_argmax_m_t",
            "rate_argmax_fraction",
        ],
    ));
    for &alpha in &alphas {
        let mut p = base.clone();
        p.alpha = alpha;
        let report = allocation_regime(&p, &m_ts, eps)?;
        let loose = allocation_regime(&p, &m_ts, eps * 10.0)?;
        let tight = allocation_regime(&p, &m_ts, eps / 10.0)?;
        let grid: Vec<u32> = report.curve.iter().map(|c| c.0).collect();
        let rates = rate_curve(&p, &grid)?;
        for ((m_t, g), (_, r)) in report.curve.iter().zip(&rates) {
            out.tables[curve_t].push(vec![
                alpha.into(),
                (*m_t).into(),
                to_per_km2(p.lambda_t / f64::from(*m_t)).into(),
                (*g).into(),
                r.rate_bits.into(),
            ]);
        }
        let best_rate = rate_argmax(&rates).unwrap_or(0);
        out.tables[summary_t].push(vec![
            alpha.into(),
            eps.into(),
            report.best_m_t.into(),
            regime_name(report.regime).into(),
            loose.best_m_t.into(),
            tight.best_m_t.into(),
            best_rate.into(),
            (f64::from(best_rate) / full).into(),
        ]);
    }
    Ok(())
}
