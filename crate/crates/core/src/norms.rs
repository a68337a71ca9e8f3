//! Weighted Sobolev and Lebesgue norms, and verifiers for the positive
//! embedding inequalities (Hoelder chain, 1-D interpolation, empirical
//! embedding-ratio estimation).
//!
//! The `H^1_V` energy uses the interior-edge staggered form (forward
//! differences read at cell-edge midpoints). It is second order like the
//! node-based central gradient but with a 4x smaller constant, which the
//! closed-form Gaussian tolerances rely on.

use serde::Serialize;

use crate::battery;
use crate::conditions;
use crate::error::{Error, Result};
use crate::grid::{grad_energy, Grid, ScalarField, SharedGrid};
use crate::potential::Potential;
use crate::scalar::Real;

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub dim: usize,
    pub radius: f64,
    pub nodes_per_axis: usize,
    pub spacing: f64,
}

impl GridMeta {
    pub fn of<T: Real>(grid: &Grid<T>) -> Self {
        GridMeta {
            dim: grid.dim(),
            radius: grid.radius().as_f64(),
            nodes_per_axis: grid.nodes_per_axis(),
            spacing: grid.spacing().as_f64(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LwTauEntry {
    pub weight: String,
    pub tau: f64,
    pub value: f64,
}

/// All norms of one field in one place; `h1v^2 = energy + weighted_mass`
/// holds to machine precision by construction.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub grid: GridMeta,
    pub energy: f64,
    pub weighted_mass: f64,
    pub h1v: f64,
    pub sup: f64,
    pub lw_tau: Vec<LwTauEntry>,
}

/// Weighted mass `int V u^2`.
pub fn weighted_mass<T: Real>(u: &ScalarField<T>, v: &Potential<T>) -> T {
    let grid = u.grid();
    let mut acc = T::zero();
    for (i, (&w, &val)) in grid.weights().iter().zip(u.values()).enumerate() {
        let x = grid.node(i);
        acc += w * v.eval(&x[..grid.dim()]) * val * val;
    }
    acc
}

/// `(int (|grad u|^2 + V u^2))^{1/2}`.
pub fn h1v_norm<T: Real>(u: &ScalarField<T>, v: &Potential<T>) -> T {
    (grad_energy(u) + weighted_mass(u, v)).sqrt()
}

/// `(int W |u|^tau)^{1/tau}` for `tau >= 1`.
pub fn lw_tau_norm<T: Real>(u: &ScalarField<T>, w: &Potential<T>, tau: T) -> Result<T> {
    if !(tau >= T::one()) {
        return Err(Error::invalid("tau", "exponent must be at least 1"));
    }
    let grid = u.grid();
    let mut acc = T::zero();
    for (i, (&wt, &val)) in grid.weights().iter().zip(u.values()).enumerate() {
        let x = grid.node(i);
        acc += wt * w.eval(&x[..grid.dim()]) * val.abs().powf(tau);
    }
    Ok(acc.powf(T::one() / tau))
}

/// Unweighted `L^q` norm; `q` may be non-integer.
pub fn lq_norm<T: Real>(u: &ScalarField<T>, q: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::invalid("q", "exponent must be at least 1"));
    }
    let grid = u.grid();
    let mut acc = T::zero();
    for (&wt, &val) in grid.weights().iter().zip(u.values()) {
        acc += wt * val.abs().powf(q);
    }
    Ok(acc.powf(T::one() / q))
}

/// Max of the node values' absolute value (no interpolation).
pub fn sup_norm<T: Real>(u: &ScalarField<T>) -> T {
    u.max_abs()
}

/// Full norm report, with `(W, tau)` entries for each requested pair.
pub fn norm_report<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    pairs: &[(&Potential<T>, T)],
) -> Result<NormReport> {
    let energy = grad_energy(u);
    let mass = weighted_mass(u, v);
    let mut lw_tau = Vec::with_capacity(pairs.len());
    for (w, tau) in pairs {
        lw_tau.push(LwTauEntry {
            weight: w.name().to_string(),
            tau: tau.as_f64(),
            value: lw_tau_norm(u, w, *tau)?.as_f64(),
        });
    }
    Ok(NormReport {
        grid: GridMeta::of(u.grid()),
        energy: energy.as_f64(),
        weighted_mass: mass.as_f64(),
        h1v: (energy + mass).sqrt().as_f64(),
        sup: sup_norm(u).as_f64(),
        lw_tau,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub violated: bool,
    pub constant: f64,
}

/// Relative slack below which an inequality check counts as violated
/// (quadrature round-off allowance).
pub const CHAIN_TOLERANCE: f64 = 1e-8;

/// Hoelder-chain verifier:
/// `||u||_{W,tau}^tau <= C ||u||_V^{2 alpha} ||u||_q^{tau - 2 alpha}` with
/// `q = (tau - 2 alpha)/(1 - alpha)`. `C` defaults to the sample constant
/// of the two-potential domination check on the same grid.
pub fn holder_chain_check<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    w: &Potential<T>,
    alpha: T,
    tau: T,
    constant: Option<T>,
) -> Result<InequalityReport> {
    let dim = u.grid().dim();
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::invalid("alpha", "must lie in (0, 1)"));
    }
    let two = T::of(2.0);
    if dim <= 2 {
        if !(tau >= two) {
            return Err(Error::invalid("tau", "must be at least 2 for N <= 2"));
        }
    } else {
        let upper = (T::of(2.0 * dim as f64) - T::of(4.0) * alpha) / T::of((dim - 2) as f64);
        if !(tau >= two && tau <= upper) {
            return Err(Error::invalid(
                "tau",
                format!("must lie in [2, {}] for N = 3", upper.as_f64()),
            ));
        }
    }
    let c = match constant {
        Some(c) => c,
        None => T::of(
            conditions::check_vw_alpha(v, w, alpha, u.grid())?
                .constant("C")
                .unwrap_or(f64::NAN),
        ),
    };
    let lhs = lw_tau_norm(u, w, tau)?.powf(tau);
    let q = (tau - two * alpha) / (T::one() - alpha);
    let rhs =
        c * h1v_norm(u, v).powf(two * alpha) * lq_norm(u, q)?.powf(tau - two * alpha);
    let slack = rhs - lhs;
    Ok(InequalityReport {
        lhs: lhs.as_f64(),
        rhs: rhs.as_f64(),
        slack: slack.as_f64(),
        violated: slack < -T::of(CHAIN_TOLERANCE) * rhs.abs().max(T::one()),
        constant: c.as_f64(),
    })
}

/// 1-D interpolation inequality
/// `||u||_{V,tau}^tau <= ||u||_inf^{tau-2} ||u||_{V,2}^2`; pointwise-exact
/// on the discrete sum, so the violation tolerance is machine level.
pub fn interpolation_check_1d<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    tau: T,
) -> Result<InequalityReport> {
    if u.grid().dim() != 1 {
        return Err(Error::invalid("u", "interpolation check needs a 1-D grid"));
    }
    if !(tau > T::of(2.0)) {
        return Err(Error::invalid("tau", "must exceed 2"));
    }
    let lhs = lw_tau_norm(u, v, tau)?.powf(tau);
    let sup = sup_norm(u);
    let rhs = sup.powf(tau - T::of(2.0)) * weighted_mass(u, v);
    let slack = rhs - lhs;
    Ok(InequalityReport {
        lhs: lhs.as_f64(),
        rhs: rhs.as_f64(),
        slack: slack.as_f64(),
        violated: slack < -T::of(1e-13) * rhs.abs().max(T::one()),
        constant: 1.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioEntry {
    pub field: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingRatioReport {
    pub max_ratio: f64,
    pub maximizer: String,
    pub entries: Vec<RatioEntry>,
}

/// Numerical lower bound on the best embedding constant
/// `sup ||u||_{W,tau} / ||u||_V`, over a seeded random battery, a ladder of
/// translated/scaled Gaussians, and any extra fields supplied (each extra
/// field is integrated on its own grid).
pub fn embedding_ratio<T: Real>(
    v: &Potential<T>,
    w: &Potential<T>,
    tau: T,
    trials: usize,
    grid: &SharedGrid<T>,
    seed: u64,
    extra: &[(String, ScalarField<T>)],
) -> Result<EmbeddingRatioReport> {
    let mut entries = Vec::new();
    let mut push = |name: String, u: &ScalarField<T>| -> Result<()> {
        let denom = h1v_norm(u, v);
        if denom > T::zero() {
            let ratio = lw_tau_norm(u, w, tau)? / denom;
            entries.push(RatioEntry {
                field: name,
                ratio: ratio.as_f64(),
            });
        }
        Ok(())
    };

    for (k, u) in battery::bump_fields(grid, trials, seed).iter().enumerate() {
        push(format!("bump[{k}]"), u)?;
    }
    let radius = grid.radius();
    for (ci, cf) in [T::zero(), radius * T::of(0.25), radius * T::of(0.5)]
        .into_iter()
        .enumerate()
    {
        for (wi, width) in [T::of(0.5), T::one(), T::of(2.0)].into_iter().enumerate() {
            let g = ScalarField::sample(grid, |x: &[T]| {
                let mut d2 = T::zero();
                for (d, &xd) in x.iter().enumerate() {
                    let c = if d == 0 { cf } else { T::zero() };
                    let diff = xd - c;
                    d2 += diff * diff;
                }
                (-d2 / (T::of(2.0) * width * width)).exp()
            })?;
            push(format!("gaussian[c{ci},w{wi}]"), &g)?;
        }
    }
    for (name, u) in extra {
        push(name.clone(), u)?;
    }
    let best = entries
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .cloned()
        .ok_or_else(|| Error::invalid("battery", "no usable fields"))?;
    Ok(EmbeddingRatioReport {
        max_ratio: best.ratio,
        maximizer: best.field,
        entries,
    })
}
