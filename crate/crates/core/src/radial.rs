//! Radial-coordinate reduction for `N >= 1`: norms under the `r^{N-1}`
//! measure, Strauss-decay checks, the radial compact-embedding tail bound,
//! and the 1-D embedding chain.

use std::sync::Arc;

use serde::Serialize;

use crate::conditions;
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::norms::{self, GridMeta, LwTauEntry, NormReport};
use crate::potential::{DecayFn, Potential};
use crate::scalar::Real;

pub type SharedRadialGrid<T> = Arc<RadialGrid<T>>;

/// Uniform grid on `[0, R]` carrying the surface-measure weights
/// `omega_{N-1} r^{N-1}` times the trapezoid rule. The `r = 0` node has
/// zero weight for `N >= 2` (the integrand `r^{N-1}` vanishes there).
#[derive(Debug)]
pub struct RadialGrid<T> {
    dim: usize,
    radius: T,
    nodes: usize,
    spacing: T,
    rs: Vec<T>,
    weights: Vec<T>,
    sphere_measure: T,
}

/// Unit-sphere surface measures for `N = 1, 2, 3` (the `N = 1` value 2
/// accounts for both half-lines of an even function).
fn sphere_measure<T: Real>(dim: usize) -> Result<T> {
    match dim {
        1 => Ok(T::of(2.0)),
        2 => Ok(T::of(2.0) * T::PI()),
        3 => Ok(T::of(4.0) * T::PI()),
        other => Err(Error::BadDimension(other)),
    }
}

impl<T: Real> RadialGrid<T> {
    pub fn new(dim: usize, radius: T, nodes: usize) -> Result<Self> {
        let omega = sphere_measure::<T>(dim)?;
        if nodes < 3 {
            return Err(Error::BadNodesPerAxis(nodes));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::BadRadius(radius.as_f64()));
        }
        let spacing = radius / T::of((nodes - 1) as f64);
        let rs: Vec<T> = (0..nodes).map(|k| T::of(k as f64) * spacing).collect();
        let weights: Vec<T> = rs
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let trap = if k == 0 || k == nodes - 1 {
                    spacing * T::of(0.5)
                } else {
                    spacing
                };
                omega * r.powi(dim as i32 - 1) * trap
            })
            .collect();
        Ok(RadialGrid {
            dim,
            radius,
            nodes,
            spacing,
            rs,
            weights,
            sphere_measure: omega,
        })
    }

    pub fn shared(self) -> SharedRadialGrid<T> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn rs(&self) -> &[T] {
        &self.rs
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, self.radius, 2 * self.nodes - 1)
    }

    fn meta(&self) -> GridMeta {
        GridMeta {
            dim: self.dim,
            radius: self.radius.as_f64(),
            nodes_per_axis: self.nodes,
            spacing: self.spacing.as_f64(),
        }
    }
}

/// Radial profile values per node.
#[derive(Debug, Clone)]
pub struct RadialField<T> {
    grid: SharedRadialGrid<T>,
    values: Vec<T>,
}

impl<T: Real> RadialField<T> {
    pub fn sample<F>(grid: &SharedRadialGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(T) -> T,
    {
        let mut values = Vec::with_capacity(grid.nodes);
        for &r in &grid.rs {
            let v = f(r);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    coords: vec![r.as_f64()],
                });
            }
            values.push(v);
        }
        Ok(RadialField {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &SharedRadialGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scaled(&self, c: T) -> Self {
        RadialField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }
}

/// `int f dmeasure` over the ball of radius `R`.
pub fn radial_integrate<T: Real>(f: &RadialField<T>) -> T {
    f.grid
        .weights
        .iter()
        .zip(&f.values)
        .fold(T::zero(), |acc, (&w, &v)| acc + w * v)
}

/// `int |du/dr|^2 dmeasure`, staggered at edge midpoints.
pub fn radial_grad_energy<T: Real>(u: &RadialField<T>) -> T {
    let g = u.grid();
    let h = g.spacing;
    let mut acc = T::zero();
    for k in 0..g.nodes - 1 {
        let diff = (u.values[k + 1] - u.values[k]) / h;
        let r_mid = (g.rs[k] + g.rs[k + 1]) * T::of(0.5);
        acc += g.sphere_measure * r_mid.powi(g.dim as i32 - 1) * h * diff * diff;
    }
    acc
}

fn eval_radial_potential<T: Real>(v: &Potential<T>, dim: usize, r: T) -> T {
    let mut x = [T::zero(); 3];
    x[0] = r;
    v.eval(&x[..dim])
}

/// `int V u^2 dmeasure`.
pub fn radial_weighted_mass<T: Real>(u: &RadialField<T>, v: &Potential<T>) -> T {
    let g = u.grid();
    let mut acc = T::zero();
    for ((&w, &r), &val) in g.weights.iter().zip(&g.rs).zip(&u.values) {
        acc += w * eval_radial_potential(v, g.dim, r) * val * val;
    }
    acc
}

/// `(int W |u|^tau dmeasure)^{1/tau}`.
pub fn radial_lw_tau_norm<T: Real>(u: &RadialField<T>, w: &Potential<T>, tau: T) -> Result<T> {
    if !(tau >= T::one()) {
        return Err(Error::invalid("tau", "exponent must be at least 1"));
    }
    let g = u.grid();
    let mut acc = T::zero();
    for ((&wt, &r), &val) in g.weights.iter().zip(&g.rs).zip(&u.values) {
        acc += wt * eval_radial_potential(w, g.dim, r) * val.abs().powf(tau);
    }
    Ok(acc.powf(T::one() / tau))
}

pub fn radial_h1v_norm<T: Real>(u: &RadialField<T>, v: &Potential<T>) -> T {
    (radial_grad_energy(u) + radial_weighted_mass(u, v)).sqrt()
}

/// Norm report under the radial measure.
pub fn radial_norms<T: Real>(
    u: &RadialField<T>,
    v: &Potential<T>,
    pairs: &[(&Potential<T>, T)],
) -> Result<NormReport> {
    let energy = radial_grad_energy(u);
    let mass = radial_weighted_mass(u, v);
    let mut lw_tau = Vec::with_capacity(pairs.len());
    for (w, tau) in pairs {
        lw_tau.push(LwTauEntry {
            weight: w.name().to_string(),
            tau: tau.as_f64(),
            value: radial_lw_tau_norm(u, w, *tau)?.as_f64(),
        });
    }
    Ok(NormReport {
        grid: u.grid().meta(),
        energy: energy.as_f64(),
        weighted_mass: mass.as_f64(),
        h1v: (energy + mass).sqrt().as_f64(),
        sup: u
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
            .as_f64(),
        lw_tau,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StraussReport {
    pub c_emp: f64,
    pub at_radius: f64,
    pub h1_norm: f64,
}

/// Empirical Strauss constant: `max_{r >= 1} r^{(N-1)/2} |u(r)| / ||u||_{H^1}`.
/// The continuum constant is below `(2 pi)^{-1/2}` for `N = 2` and
/// `(2 sqrt(pi))^{-1}` for `N = 3`, so grid values are O(0.1).
pub fn strauss_check<T: Real>(u: &RadialField<T>) -> Result<StraussReport> {
    let g = u.grid();
    if g.dim < 2 {
        return Err(Error::invalid("u", "Strauss decay needs N >= 2"));
    }
    if !(g.radius > T::one()) {
        return Err(Error::invalid("u", "grid must extend past r = 1"));
    }
    let one = crate::potential::make_constant(T::one())?;
    let h1 = radial_h1v_norm(u, &one);
    if !(h1 > T::zero()) {
        return Ok(StraussReport {
            c_emp: 0.0,
            at_radius: 0.0,
            h1_norm: 0.0,
        });
    }
    let expo = T::of((g.dim - 1) as f64 / 2.0);
    let mut best = T::zero();
    let mut best_r = T::zero();
    for (&r, &v) in g.rs.iter().zip(&u.values) {
        if r >= T::one() {
            let val = r.powf(expo) * v.abs() / h1;
            if val > best {
                best = val;
                best_r = r;
            }
        }
    }
    Ok(StraussReport {
        c_emp: best.as_f64(),
        at_radius: best_r.as_f64(),
        h1_norm: h1.as_f64(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub r_cut: f64,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub c_vw: f64,
    pub c_strauss: f64,
    pub sup_phi: f64,
    pub tail_mass: f64,
}

/// Tail estimate behind the radial compact embedding: compares the tail
/// integral `int_{r >= R_cut} W |u|^tau` against the chain bound
/// `C_vw * sup phi * (C_strauss ||u||_{H^1})^{tau-2} * int_{r >= R_cut} V u^2`.
/// Every chain step is a pointwise inequality evaluated on the same nodes,
/// so the slack is nonnegative up to round-off whenever `tau >= tau_bar`
/// and `R_cut >= 1`.
pub fn thrad_tail<T: Real>(
    u: &RadialField<T>,
    v: &Potential<T>,
    w: &Potential<T>,
    phi: &DecayFn<T>,
    tau: T,
    tau_bar: T,
    r_cut: T,
) -> Result<TailReport> {
    let g = u.grid();
    if g.dim < 2 {
        return Err(Error::invalid("u", "tail bound needs N >= 2"));
    }
    if !(tau_bar > T::of(2.0)) || !(tau >= tau_bar) {
        return Err(Error::invalid("tau", "need tau >= tau_bar > 2"));
    }
    if !(r_cut >= T::one()) || r_cut >= g.radius {
        return Err(Error::invalid(
            "r_cut",
            "cutoff must lie in [1, grid radius)",
        ));
    }
    if !v.is_radial() || !w.is_radial() {
        return Err(Error::invalid("potentials", "V and W must be radial"));
    }
    phi.check_vanishing(r_cut)?;

    let strauss = strauss_check(u)?;
    let c_strauss = T::of(strauss.c_emp);
    let h1 = T::of(strauss.h1_norm);

    let exponent = T::of((g.dim - 1) as f64) * (tau_bar - T::of(2.0)) / T::of(2.0);
    let mut c_vw = T::zero();
    let mut lhs = T::zero();
    let mut tail_mass = T::zero();
    let mut sup_phi = T::zero();
    for ((&wt, &r), &val) in g.weights.iter().zip(&g.rs).zip(&u.values) {
        if r < r_cut {
            continue;
        }
        let vv = eval_radial_potential(v, g.dim, r);
        let wv = eval_radial_potential(w, g.dim, r);
        let phi_r = phi.eval(r);
        let ratio = wv / (phi_r * vv * r.powf(exponent));
        if ratio > c_vw {
            c_vw = ratio;
        }
        if phi_r > sup_phi {
            sup_phi = phi_r;
        }
        lhs += wt * wv * val.abs().powf(tau);
        tail_mass += wt * vv * val * val;
    }
    let bound = c_vw * sup_phi * (c_strauss * h1).powf(tau - T::of(2.0)) * tail_mass;
    Ok(TailReport {
        r_cut: r_cut.as_f64(),
        lhs: lhs.as_f64(),
        bound: bound.as_f64(),
        slack: (bound - lhs).as_f64(),
        c_vw: c_vw.as_f64(),
        c_strauss: strauss.c_emp,
        sup_phi: sup_phi.as_f64(),
        tail_mass: tail_mass.as_f64(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Embed1dReport {
    pub empirical: f64,
    pub chain_constant: f64,
    pub gradv_constant: f64,
    pub holds: bool,
}

/// 1-D sup-norm embedding check: verifies the pointwise bound
/// `sqrt(V(x)) u(x)^2 <= (1 + C_V/2) ||u||_V^2` at every node, with `C_V`
/// the gradient-domination constant estimated on the same grid. Reports
/// the empirical constant `max sqrt(V) u^2 / ||u||_V^2`.
pub fn embed_1d_check<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
) -> Result<Embed1dReport> {
    let grid = u.grid();
    if grid.dim() != 1 {
        return Err(Error::invalid("u", "embedding check needs a 1-D grid"));
    }
    let gradv = conditions::check_gradv(v, grid);
    let c_v = T::of(gradv.constant("C").unwrap_or(f64::NAN));
    let chain = T::one() + c_v / T::of(2.0);
    let norm_sq = norms::h1v_norm(u, v).powi(2);
    if !(norm_sq > T::zero()) {
        return Ok(Embed1dReport {
            empirical: 0.0,
            chain_constant: chain.as_f64(),
            gradv_constant: c_v.as_f64(),
            holds: true,
        });
    }
    let mut emp = T::zero();
    for (i, &val) in u.values().iter().enumerate() {
        let x = grid.node(i);
        let cand = v.eval(&x[..1]).sqrt() * val * val / norm_sq;
        if cand > emp {
            emp = cand;
        }
    }
    Ok(Embed1dReport {
        empirical: emp.as_f64(),
        chain_constant: chain.as_f64(),
        gradv_constant: c_v.as_f64(),
        holds: emp <= chain * T::of(1.0 + 1e-9),
    })
}
