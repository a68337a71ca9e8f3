//! `check-potential`: run the configured condition certifiers against one
//! potential and emit one report per check.

use anyhow::{anyhow, Result};
use serde::Serialize;

use wsemb::conditions::{
    check_cstar, check_gradv, check_v0, check_v1, check_v2, check_vw_alpha, check_vw_rad,
    ConditionReport, Verdict,
};
use wsemb::grid::Grid;

use crate::config::{CheckName, ChecksSpec, ExperimentConfig};
use crate::output::{refined_name, OutputDir};

use super::CommandStatus;

#[derive(Serialize)]
struct Summary {
    potential: String,
    verdicts: Vec<(String, Verdict)>,
    /// Present when the potential claims radial symmetry: spot check on
    /// random rotations of sample points.
    radial_flag_consistent: Option<bool>,
}

fn default_checks() -> ChecksSpec {
    ChecksSpec {
        run: vec![CheckName::Cstar, CheckName::Gradv],
        m: 1.0,
        eps: 1.0,
        radii: None,
        centers: None,
        r_tilde: None,
        phi: None,
        samples_per_axis: 17,
    }
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    _seed: u64,
    refine: bool,
) -> Result<CommandStatus> {
    let gs = cfg.grid_spec()?;
    let checks = cfg.checks.clone().unwrap_or_else(default_checks);
    let mut status = CommandStatus::default();

    let mut emit = |nodes: usize, rename: bool, status: &mut CommandStatus| -> Result<()> {
        let grid = Grid::new(gs.dimension, gs.radius, nodes)?.shared();
        let v = cfg.potential()?;
        let sample_radii = checks
            .radii
            .clone()
            .unwrap_or_else(|| vec![gs.radius / 2.0, gs.radius, 2.0 * gs.radius, 4.0 * gs.radius]);
        let mut verdicts = Vec::new();
        for check in &checks.run {
            let (name, report): (&str, ConditionReport) = match check {
                CheckName::Cstar => ("check-cstar.json", check_cstar(&v, &grid)),
                CheckName::Gradv => ("check-gradv.json", check_gradv(&v, &grid)),
                CheckName::VwAlpha => {
                    let w = cfg
                        .weight
                        .as_ref()
                        .ok_or_else(|| anyhow!("vw-alpha needs a `weight` section"))?
                        .build()?;
                    let alpha = cfg
                        .exponents
                        .and_then(|e| e.alpha)
                        .ok_or_else(|| anyhow!("vw-alpha needs exponents.alpha"))?;
                    ("check-vw-alpha.json", check_vw_alpha(&v, &w, alpha, &grid)?)
                }
                CheckName::V0 => {
                    let centers = checks
                        .centers
                        .clone()
                        .ok_or_else(|| anyhow!("v0 needs checks.centers"))?;
                    (
                        "check-v0.json",
                        check_v0(&v, &centers, checks.m, checks.samples_per_axis)?,
                    )
                }
                CheckName::V1 => (
                    "check-v1.json",
                    check_v1(
                        &v,
                        gs.dimension,
                        checks.m,
                        &sample_radii,
                        checks.samples_per_axis,
                    )?,
                ),
                CheckName::V2 => (
                    "check-v2.json",
                    check_v2(
                        &v,
                        gs.dimension,
                        checks.eps,
                        &sample_radii,
                        checks.samples_per_axis,
                    )?,
                ),
                CheckName::VwRad => {
                    let w = cfg
                        .weight
                        .as_ref()
                        .ok_or_else(|| anyhow!("vw-rad needs a `weight` section"))?
                        .build()?;
                    let phi = checks
                        .phi
                        .as_ref()
                        .ok_or_else(|| anyhow!("vw-rad needs checks.phi"))?
                        .build()?;
                    let tau_bar = cfg
                        .exponents
                        .and_then(|e| e.tau_bar)
                        .ok_or_else(|| anyhow!("vw-rad needs exponents.tau_bar"))?;
                    let r_tilde = checks.r_tilde.unwrap_or(1.0);
                    (
                        "check-vw-rad.json",
                        check_vw_rad(&v, &w, &phi, tau_bar, r_tilde, &grid)?,
                    )
                }
            };
            let file = if rename {
                refined_name(name)
            } else {
                name.to_string()
            };
            if !rename {
                if report.verdict != Verdict::HoldsOnSample {
                    status.fail(format!("{}: {:?}", report.condition, report.verdict));
                }
                verdicts.push((report.condition.clone(), report.verdict));
            }
            out.write_json(&file, &report)?;
        }
        if !rename {
            let v = cfg.potential()?;
            let radial_flag_consistent = v
                .is_radial()
                .then(|| v.spot_check_radial(gs.dimension, 9, 64));
            if radial_flag_consistent == Some(false) {
                status.fail("radial flag inconsistent on rotated samples");
            }
            out.write_json(
                "summary.json",
                &Summary {
                    potential: v.name().to_string(),
                    verdicts,
                    radial_flag_consistent,
                },
            )?;
        }
        Ok(())
    };

    emit(gs.nodes_per_axis, false, &mut status)?;
    if refine {
        emit(2 * gs.nodes_per_axis - 1, true, &mut status)?;
    }
    Ok(status)
}
