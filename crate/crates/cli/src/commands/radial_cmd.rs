//! `radial`: Strauss-decay constants and the compact-embedding tail bound
//! over a radial bump battery for `N >= 2`; the sup-norm embedding and
//! interpolation machinery for `N = 1`.

use anyhow::Result;
use serde::Serialize;

use wsemb::battery::{bump_fields, radial_bump_fields};
use wsemb::grid::Grid;
use wsemb::norms::interpolation_check_1d;
use wsemb::radial::{embed_1d_check, strauss_check, thrad_tail, RadialGrid};

use crate::config::{ExperimentConfig, PhiSpec};
use crate::output::{fmt, refined_name, OutputDir};

use super::CommandStatus;

#[derive(Serialize)]
struct RadialSummary {
    dimension: usize,
    trials: usize,
    seed: u64,
    tau: f64,
    tau_bar: f64,
    r_cut: f64,
    max_strauss: f64,
    min_tail_slack: f64,
}

#[derive(Serialize)]
struct OneDimSummary {
    trials: usize,
    seed: u64,
    chain_constant: f64,
    max_empirical: f64,
    all_hold: bool,
    interpolation_violations: usize,
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    seed: u64,
    refine: bool,
) -> Result<CommandStatus> {
    let gs = cfg.grid_spec()?;
    let radial_cfg = cfg.radial.clone();
    let trials = radial_cfg.as_ref().map_or(40, |r| r.trials);
    let mut status = CommandStatus::default();

    let mut emit = |nodes: usize, rename: bool, status: &mut CommandStatus| -> Result<()> {
        let name = |n: &str| {
            if rename {
                refined_name(n)
            } else {
                n.to_string()
            }
        };
        if gs.dimension == 1 {
            let grid = Grid::new(1, gs.radius, nodes)?.shared();
            let v = cfg.potential()?;
            let tau = cfg.exponents.and_then(|e| e.tau).unwrap_or(4.0);
            let fields = bump_fields(&grid, trials, seed);
            let mut rows = Vec::new();
            let mut max_emp = 0.0_f64;
            let mut chain = 0.0;
            let mut all_hold = true;
            let mut interp_violations = 0;
            for (k, u) in fields.iter().enumerate() {
                let rep = embed_1d_check(u, &v)?;
                max_emp = max_emp.max(rep.empirical);
                chain = rep.chain_constant;
                all_hold &= rep.holds;
                let interp = interpolation_check_1d(u, &v, tau)?;
                if interp.violated {
                    interp_violations += 1;
                }
                rows.push(vec![
                    k.to_string(),
                    fmt(rep.empirical),
                    fmt(rep.chain_constant),
                    rep.holds.to_string(),
                    fmt(interp.slack),
                ]);
            }
            out.write_csv(
                &name("embed-1d.csv"),
                &["field", "empirical", "chain_constant", "holds", "interp_slack"],
                &rows,
            )?;
            out.write_json(
                &name("embed-1d.json"),
                &OneDimSummary {
                    trials,
                    seed,
                    chain_constant: chain,
                    max_empirical: max_emp,
                    all_hold,
                    interpolation_violations: interp_violations,
                },
            )?;
            if !rename {
                if !all_hold {
                    status.fail("pointwise sup-norm bound exceeded the chain constant");
                }
                if interp_violations > 0 {
                    status.fail(format!(
                        "interpolation inequality violated on {interp_violations} fields"
                    ));
                }
            }
            return Ok(());
        }

        let grid = RadialGrid::new(gs.dimension, gs.radius, nodes)?.shared();
        let v = cfg.potential()?;
        let w = match &cfg.weight {
            Some(spec) => spec.build()?,
            None => v.clone(),
        };
        let phi = radial_cfg
            .as_ref()
            .and_then(|r| r.phi)
            .unwrap_or(PhiSpec::InversePower { beta: 1.0 })
            .build()?;
        let tau = cfg.exponents.and_then(|e| e.tau).unwrap_or(4.0);
        let tau_bar = cfg.exponents.and_then(|e| e.tau_bar).unwrap_or(tau);
        let r_cut = radial_cfg.as_ref().map_or(2.0, |r| r.r_cut);

        let fields = radial_bump_fields(&grid, trials, seed);
        let mut rows = Vec::new();
        let mut max_strauss = 0.0_f64;
        let mut min_slack = f64::INFINITY;
        for (k, u) in fields.iter().enumerate() {
            let strauss = strauss_check(u)?;
            let tail = thrad_tail(u, &v, &w, &phi, tau, tau_bar, r_cut)?;
            max_strauss = max_strauss.max(strauss.c_emp);
            min_slack = min_slack.min(tail.slack);
            rows.push(vec![
                k.to_string(),
                fmt(strauss.c_emp),
                fmt(strauss.at_radius),
                fmt(tail.lhs),
                fmt(tail.bound),
                fmt(tail.slack),
            ]);
        }
        out.write_csv(
            &name("radial-battery.csv"),
            &["field", "strauss_c", "strauss_radius", "tail_lhs", "tail_bound", "tail_slack"],
            &rows,
        )?;
        let nonneg = min_slack >= -1e-12;
        out.write_json(
            &name("radial.json"),
            &RadialSummary {
                dimension: gs.dimension,
                trials,
                seed,
                tau,
                tau_bar,
                r_cut,
                max_strauss,
                min_tail_slack: min_slack,
            },
        )?;
        if !rename {
            if !nonneg {
                status.fail(format!("tail bound slack went negative: {min_slack}"));
            }
            if max_strauss > 0.5 {
                status.fail(format!("Strauss constant {max_strauss} above the 0.5 cap"));
            }
        }
        Ok(())
    };

    emit(gs.nodes_per_axis, false, &mut status)?;
    if refine {
        emit(2 * gs.nodes_per_axis - 1, true, &mut status)?;
    }
    Ok(status)
}
