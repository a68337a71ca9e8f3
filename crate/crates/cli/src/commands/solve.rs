//! `solve`: minimize the constrained functional, extract the eigenpair,
//! and emit the solution field, trace, and concentration diagnostics.

use anyhow::{anyhow, Result};
use serde::Serialize;

use wsemb::concentration::{concentration_trace, ConcentrationOpts, TrichotomyLabel};
use wsemb::conditions::{check_gradv, Verdict};
use wsemb::grid::{Grid, ScalarField, SharedGrid};
use wsemb::nehari::{NlsFunctional, SolveOpts, SolveOutcome, Termination};
use wsemb::norms::GridMeta;
use wsemb::scalar::norm_sq;

use crate::config::{ExperimentConfig, SolverSpec};
use crate::output::{fmt, OutputDir};

use super::CommandStatus;

#[derive(Serialize)]
struct SolutionSummary {
    grid: GridMeta,
    potential: String,
    weight: String,
    p: f64,
    lambda: f64,
    mu: f64,
    i_value: f64,
    j_over_a: f64,
    residual: f64,
    negativity: f64,
    lambda_identity_slack: f64,
    outer_mass_fraction: f64,
    iterations: usize,
    converged: bool,
    termination: Termination,
    rescaled_radius: Option<f64>,
    concentration_label: TrichotomyLabel,
}

fn initial_field(
    grid: &SharedGrid<f64>,
    spec: &SolverSpec,
) -> Result<ScalarField<f64>> {
    let center = spec
        .initial_center
        .clone()
        .unwrap_or_else(|| vec![0.0; grid.dim()]);
    if center.len() != grid.dim() {
        return Err(anyhow!("initial_center dimension mismatch"));
    }
    let width = spec.initial_width;
    Ok(ScalarField::sample(grid, |x| {
        let mut d = vec![0.0; x.len()];
        for (i, (&xi, &ci)) in x.iter().zip(&center).enumerate() {
            d[i] = xi - ci;
        }
        (-norm_sq(&d) / (2.0 * width * width)).exp()
    })?)
}

fn solve_at(
    cfg: &ExperimentConfig,
    radius: f64,
    nodes: usize,
    spec: &SolverSpec,
    p: f64,
) -> Result<(SharedGrid<f64>, SolveOutcome<f64>)> {
    let gs = cfg.grid_spec()?;
    let grid = Grid::new(gs.dimension, radius, nodes)?.shared();
    let v = cfg.potential()?;
    let w = match &cfg.weight {
        Some(s) => s.build()?,
        None => v.clone(),
    };
    let f = NlsFunctional::new(&grid, &v, &w, p)?;
    let init = initial_field(&grid, spec)?;
    let opts = SolveOpts {
        tol: spec.tol,
        max_iter: spec.max_iter,
        cg_tol: spec.cg_tol,
        snapshot_every: spec.snapshot_every,
        ..SolveOpts::default()
    };
    let outcome = f.minimize(&init, &opts)?;
    Ok((grid, outcome))
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    _seed: u64,
    refine: bool,
) -> Result<CommandStatus> {
    let gs = cfg.grid_spec()?;
    let spec = cfg.solver.clone().unwrap_or_default();
    let p = cfg.exponents.and_then(|e| e.p).unwrap_or(3.0);
    let v = cfg.potential()?;
    let mut status = CommandStatus::default();

    if !spec.skip_potential_check {
        let check_grid = Grid::new(gs.dimension, gs.radius, 129.min(gs.nodes_per_axis))?;
        let report = check_gradv(&v, &check_grid);
        out.write_json("potential-check.json", &report)?;
        if report.verdict != Verdict::HoldsOnSample {
            status.fail(format!(
                "potential fails the gradient-domination check: {:?}",
                report.verdict
            ));
            return Ok(status);
        }
    }

    let (mut grid, mut outcome) = solve_at(cfg, gs.radius, gs.nodes_per_axis, &spec, p)?;
    let mut rescaled_radius = None;
    if outcome.solution.outer_mass_fraction > 1e-8 && spec.rerun_on_escape {
        let bigger = gs.radius * 1.5;
        let (g2, o2) = solve_at(cfg, bigger, gs.nodes_per_axis, &spec, p)?;
        grid = g2;
        outcome = o2;
        rescaled_radius = Some(bigger);
    }
    let sol = &outcome.solution;

    let trace = concentration_trace(
        &outcome.trajectory,
        &v,
        p,
        &ConcentrationOpts::default(),
    )?;

    let w_name = match &cfg.weight {
        Some(s) => s.build()?.name().to_string(),
        None => v.name().to_string(),
    };
    out.write_json(
        "solution.json",
        &SolutionSummary {
            grid: GridMeta::of(&grid),
            potential: v.name().to_string(),
            weight: w_name,
            p,
            lambda: sol.lambda,
            mu: sol.mu,
            i_value: sol.i_value,
            j_over_a: sol.j_over_a,
            residual: sol.residual,
            negativity: sol.negativity,
            lambda_identity_slack: sol.lambda_identity_slack,
            outer_mass_fraction: sol.outer_mass_fraction,
            iterations: outcome.iterations,
            converged: outcome.converged,
            termination: outcome.termination,
            rescaled_radius,
            concentration_label: trace.label,
        },
    )?;

    // solution field as x[,y[,z]],u rows
    let dim = grid.dim();
    let mut rows = Vec::with_capacity(grid.num_nodes());
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let mut row: Vec<String> = x[..dim].iter().map(|&c| fmt(c)).collect();
        row.push(fmt(sol.u_bar.values()[i]));
        rows.push(row);
    }
    let header: Vec<&str> = match dim {
        1 => vec!["x", "u"],
        2 => vec!["x", "y", "u"],
        _ => vec!["x", "y", "z", "u"],
    };
    out.write_csv("solution.csv", &header, &rows)?;

    let trace_rows: Vec<Vec<String>> = outcome
        .trajectory
        .iter()
        .map(|s| {
            vec![
                s.iter.to_string(),
                fmt(s.energy_sq),
                fmt(s.mass_sq),
                fmt(s.nonlinear),
                fmt(s.i_value),
                fmt(s.j_value),
                fmt(s.grad_norm),
            ]
        })
        .collect();
    out.write_csv(
        "trace.csv",
        &["iter", "energy_sq", "mass_sq", "nonlinear", "i_value", "j_value", "grad_norm"],
        &trace_rows,
    )?;
    out.write_plot(
        "i-vs-iter.dat",
        &outcome
            .trajectory
            .iter()
            .map(|s| (s.iter as f64, s.i_value))
            .collect::<Vec<_>>(),
    )?;

    // solution profile along the positive first axis
    let mut profile = Vec::new();
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        if x[1..dim].iter().all(|&c| c == 0.0) && x[0] >= 0.0 {
            profile.push((x[0], sol.u_bar.values()[i]));
        }
    }
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.write_plot("solution-profile.dat", &profile)?;

    out.write_json("concentration.json", &trace)?;
    if let Some(last) = trace.rows.last() {
        out.write_plot(
            "q-vs-radius.dat",
            &last
                .entries
                .iter()
                .map(|e| (e.radius, e.q))
                .collect::<Vec<_>>(),
        )?;
    }

    if !outcome.converged {
        status.fail(format!(
            "solver did not converge: {:?} after {} iterations",
            outcome.termination, outcome.iterations
        ));
    }
    if sol.lambda <= 0.0 {
        status.fail("extracted eigenvalue is not positive");
    }

    if refine {
        let radius = rescaled_radius.unwrap_or(gs.radius);
        let (g_f, o_f) = solve_at(cfg, radius, 2 * gs.nodes_per_axis - 1, &spec, p)?;
        let s_f = &o_f.solution;
        out.write_json(
            "solution.refined.json",
            &SolutionSummary {
                grid: GridMeta::of(&g_f),
                potential: v.name().to_string(),
                weight: match &cfg.weight {
                    Some(s) => s.build()?.name().to_string(),
                    None => v.name().to_string(),
                },
                p,
                lambda: s_f.lambda,
                mu: s_f.mu,
                i_value: s_f.i_value,
                j_over_a: s_f.j_over_a,
                residual: s_f.residual,
                negativity: s_f.negativity,
                lambda_identity_slack: s_f.lambda_identity_slack,
                outer_mass_fraction: s_f.outer_mass_fraction,
                iterations: o_f.iterations,
                converged: o_f.converged,
                termination: o_f.termination,
                rescaled_radius,
                concentration_label: trace.label,
            },
        )?;
        out.write_json(
            "richardson.json",
            &serde_json::json!({
                "lambda_delta": (s_f.lambda - sol.lambda).abs(),
                "i_value_delta": (s_f.i_value - sol.i_value).abs(),
                "residual_ratio": sol.residual / s_f.residual,
            }),
        )?;
    }
    Ok(status)
}
