//! `verify-embedding`: Hoelder-chain and interpolation inequality sweeps
//! over a seeded bump battery, plus the empirical embedding ratio.

use anyhow::Result;
use serde::Serialize;

use wsemb::battery::bump_fields;
use wsemb::conditions::check_vw_alpha;
use wsemb::grid::Grid;
use wsemb::norms::{
    embedding_ratio, holder_chain_check, interpolation_check_1d, norm_report,
};
use wsemb::potential::make_constant;

use crate::config::ExperimentConfig;
use crate::output::{fmt, refined_name, OutputDir};

use super::CommandStatus;

#[derive(Serialize)]
struct ChainSummary {
    trials: usize,
    seed: u64,
    alpha: f64,
    tau: f64,
    constant: f64,
    violations: usize,
    min_slack: f64,
}

#[derive(Serialize)]
struct InterpolationSummary {
    trials: usize,
    tau: f64,
    violations: usize,
    min_slack: f64,
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    seed: u64,
    refine: bool,
) -> Result<CommandStatus> {
    let gs = cfg.grid_spec()?;
    let trials = cfg.battery.map_or(100, |b| b.trials);
    let alpha = cfg.exponents.and_then(|e| e.alpha).unwrap_or(0.5);
    let tau = cfg.exponents.and_then(|e| e.tau).unwrap_or(3.0);
    let mut status = CommandStatus::default();

    let mut emit = |nodes: usize, rename: bool, status: &mut CommandStatus| -> Result<()> {
        let name = |n: &str| {
            if rename {
                refined_name(n)
            } else {
                n.to_string()
            }
        };
        let grid = Grid::new(gs.dimension, gs.radius, nodes)?.shared();
        let v = cfg.potential()?;
        let w = match &cfg.weight {
            Some(spec) => spec.build()?,
            None => make_constant(1.0)?,
        };
        let vw = check_vw_alpha(&v, &w, alpha, &grid)?;
        out.write_json(&name("vw-constant.json"), &vw)?;
        let c = vw.constant("C").unwrap_or(f64::NAN);

        let fields = bump_fields(&grid, trials, seed);
        let mut rows = Vec::with_capacity(fields.len());
        let mut norm_rows = Vec::with_capacity(fields.len());
        let mut violations = 0;
        let mut min_slack = f64::INFINITY;
        for (k, u) in fields.iter().enumerate() {
            let rep = holder_chain_check(u, &v, &w, alpha, tau, Some(c))?;
            if rep.violated {
                violations += 1;
            }
            min_slack = min_slack.min(rep.slack);
            rows.push(vec![
                k.to_string(),
                fmt(rep.lhs),
                fmt(rep.rhs),
                fmt(rep.slack),
                rep.violated.to_string(),
            ]);
            let nr = norm_report(u, &v, &[(&w, tau)])?;
            norm_rows.push(vec![
                k.to_string(),
                fmt(nr.energy),
                fmt(nr.weighted_mass),
                fmt(nr.h1v),
                fmt(nr.sup),
                fmt(nr.lw_tau[0].value),
            ]);
        }
        out.write_csv(
            &name("holder-chain.csv"),
            &["field", "lhs", "rhs", "slack", "violated"],
            &rows,
        )?;
        out.write_csv(
            &name("norms.csv"),
            &["field", "energy", "weighted_mass", "h1v", "sup", "lw_tau"],
            &norm_rows,
        )?;
        out.write_json(
            &name("holder-chain.json"),
            &ChainSummary {
                trials,
                seed,
                alpha,
                tau,
                constant: c,
                violations,
                min_slack,
            },
        )?;
        if !rename && violations > 0 {
            status.fail(format!("holder chain violated on {violations} fields"));
        }

        if gs.dimension == 1 {
            let tau_1d = tau.max(2.5);
            let mut violations = 0;
            let mut min_slack = f64::INFINITY;
            for u in &fields {
                let rep = interpolation_check_1d(u, &v, tau_1d)?;
                if rep.violated {
                    violations += 1;
                }
                min_slack = min_slack.min(rep.slack);
            }
            out.write_json(
                &name("interpolation.json"),
                &InterpolationSummary {
                    trials,
                    tau: tau_1d,
                    violations,
                    min_slack,
                },
            )?;
            if !rename && violations > 0 {
                status.fail(format!("interpolation inequality violated on {violations} fields"));
            }
        }

        // reference-field norm report (unit-width Gaussian at the origin)
        let reference = wsemb::grid::ScalarField::sample(&grid, |x: &[f64]| {
            (-wsemb::scalar::norm_sq(x) / 2.0).exp()
        })?;
        out.write_json(
            &name("norms.json"),
            &norm_report(&reference, &v, &[(&w, tau)])?,
        )?;

        let ratio = embedding_ratio(&v, &w, tau, trials, &grid, seed, &[])?;
        out.write_json(&name("embedding-ratio.json"), &ratio)?;
        Ok(())
    };

    emit(gs.nodes_per_axis, false, &mut status)?;
    if refine {
        emit(2 * gs.nodes_per_axis - 1, true, &mut status)?;
    }
    Ok(status)
}
