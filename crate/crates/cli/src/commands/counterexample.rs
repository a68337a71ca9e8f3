//! `counterexample`: build the configured bump sequence, certify its norm
//! behaviour, and run the weak-null pairing decay against a fixed battery
//! of test fields.

use anyhow::{anyhow, Result};

use wsemb::bumps::{
    build_annular, build_general, build_vnon, certify_norms, weak_null_check, BumpSequence,
    SequenceKind, TestField,
};
use wsemb::potential::{make_annular_step, Potential};

use crate::config::{ExperimentConfig, SequenceKindSpec, SequenceSpec};
use crate::output::{fmt, refined_name, OutputDir};

use super::CommandStatus;

fn build(
    spec: &SequenceSpec,
    v: &Potential<f64>,
    tau: f64,
    local_nodes: usize,
) -> Result<BumpSequence<f64>> {
    Ok(match spec.kind {
        SequenceKindSpec::Vnon => build_vnon(
            v,
            3,
            tau,
            spec.m,
            spec.n_max.expect("validated"),
            local_nodes,
        )?,
        SequenceKindSpec::General => build_general(
            v,
            spec.m,
            spec.centers.as_ref().expect("validated"),
            local_nodes,
        )?,
        SequenceKindSpec::Annular => {
            let [lo, hi] = spec.n_range.expect("validated");
            build_annular(lo..=hi, local_nodes)?
        }
    })
}

fn default_battery(dim: usize) -> Vec<TestField<f64>> {
    let origin = vec![0.0; dim];
    vec![
        TestField::smooth_bump("unit_bump_at_origin", origin.clone(), 0.5, 1.0),
        TestField::smooth_bump("wide_bump_at_origin", origin.clone(), 1.0, 2.0),
        TestField::gaussian("wide_gaussian", origin, 2.0),
    ]
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    _seed: u64,
    refine: bool,
) -> Result<CommandStatus> {
    let spec = cfg
        .sequence
        .clone()
        .ok_or_else(|| anyhow!("config is missing the `sequence` section"))?;
    let v = match (&cfg.potential, spec.kind) {
        (Some(p), _) => p.build()?,
        (None, SequenceKindSpec::Annular) => make_annular_step(),
        (None, _) => return Err(anyhow!("config is missing the `potential` section")),
    };
    let tau = cfg.exponents.and_then(|e| e.tau).unwrap_or(match spec.kind {
        SequenceKindSpec::Vnon => 4.0,
        _ => 3.0,
    });
    let mut status = CommandStatus::default();

    let mut emit = |local_nodes: usize, rename: bool, status: &mut CommandStatus| -> Result<()> {
        let name = |n: &str| {
            if rename {
                refined_name(n)
            } else {
                n.to_string()
            }
        };
        let seq = build(&spec, &v, tau, local_nodes)?;
        let cert = certify_norms(&seq, &v, tau)?;
        out.write_json(&name("certification.json"), &cert)?;
        let rows: Vec<Vec<String>> = cert
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    fmt(r.center_radius),
                    fmt(r.potential_at_center),
                    fmt(r.h1v),
                    fmt(r.lv_tau),
                    fmt(r.max_grad),
                    fmt(r.grad_bound),
                    r.scaled_h1v.map(fmt).unwrap_or_default(),
                    r.partial_sum_scaled.map(fmt).unwrap_or_default(),
                    r.partial_sum_tau_pow.map(fmt).unwrap_or_default(),
                ]
            })
            .collect();
        out.write_csv(
            &name("certification.csv"),
            &[
                "n",
                "center_radius",
                "potential_at_center",
                "h1v",
                "lv_tau",
                "max_grad",
                "grad_bound",
                "scaled_h1v",
                "partial_sum_scaled",
                "partial_sum_tau_pow",
            ],
            &rows,
        )?;
        out.write_plot(
            &name("lv-tau-vs-n.dat"),
            &cert
                .rows
                .iter()
                .map(|r| (r.index as f64, r.lv_tau))
                .collect::<Vec<_>>(),
        )?;
        out.write_plot(
            &name("h1v-vs-n.dat"),
            &cert
                .rows
                .iter()
                .map(|r| (r.index as f64, r.h1v))
                .collect::<Vec<_>>(),
        )?;

        let dim = seq.terms.first().map_or(2, |t| t.grid.dim());
        let weak = weak_null_check(&seq, &v, &default_battery(dim))?;
        out.write_json(&name("weak-null.json"), &weak)?;

        if !rename {
            if !cert.h1v_bounded {
                status.fail(format!("H1V band {} exceeds 3", cert.h1v_band));
            }
            if !cert.grad_bounds_hold {
                status.fail("measured gradients exceed the analytic bound");
            }
            match seq.kind {
                SequenceKind::Vnon => {
                    if !cert.lv_tau_strictly_increasing {
                        status.fail("lv_tau not strictly increasing");
                    }
                    if cert.tails_under_envelope != Some(true) {
                        status.fail("scaled-term tails escape the geometric envelope");
                    }
                }
                SequenceKind::General | SequenceKind::Annular => {
                    if !cert.bounded_away_from_zero {
                        status.fail("lv_tau not bounded away from zero");
                    }
                    if !weak.all_tend_to_zero {
                        status.fail("weak-null pairings do not decay");
                    }
                }
            }
        }
        Ok(())
    };

    emit(spec.local_nodes, false, &mut status)?;
    if refine {
        emit(2 * spec.local_nodes - 1, true, &mut status)?;
    }
    Ok(status)
}
