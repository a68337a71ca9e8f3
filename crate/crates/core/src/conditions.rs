//! Numerical certifiers for the hypothesis classes a potential can satisfy.
//!
//! Conditions quantified over all of `R^N` can only be evidenced on a
//! sample, never decided; every report therefore records the sample used
//! (max radius, node count, spacing) and, for asymptotic conditions, a
//! growth or decay table over increasing radii instead of a bare boolean.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{DecayFn, Potential};
use crate::scalar::{norm, norm_sq, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnSample,
    Fails,
    GrowsUnbounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub radius: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleInfo {
    pub max_radius: f64,
    pub points: usize,
    pub spacing: f64,
}

/// Outcome of one condition check: estimated constants, the maximizing
/// sample point, a verdict, and the growth/decay table backing it.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub potential: String,
    pub constants: BTreeMap<String, f64>,
    pub max_point: Option<Vec<f64>>,
    pub verdict: Verdict,
    pub table: Vec<GrowthRow>,
    pub sample: SampleInfo,
    pub fd_gradient_fallback: bool,
}

impl ConditionReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

/// Ratio by which the running maximum must grow across the radius table
/// before a condition is declared unbounded on the sample.
pub const DEFAULT_GROWTH_FACTOR: f64 = 2.0;

/// Decay-table proxy for little-o: the last entry must drop below a quarter
/// of the first.
pub const DEFAULT_DECAY_FACTOR: f64 = 0.25;

fn quarter_radii<T: Real>(r: T) -> Vec<T> {
    (1..=4).map(|k| r * T::of(k as f64 / 4.0)).collect()
}

fn sample_info<T: Real>(grid: &Grid<T>) -> SampleInfo {
    SampleInfo {
        max_radius: grid.radius().as_f64(),
        points: grid.num_nodes(),
        spacing: grid.spacing().as_f64(),
    }
}

fn growth_verdict(table: &[GrowthRow], factor: f64) -> Verdict {
    let first = table.first().map_or(0.0, |r| r.value);
    let last = table.last().map_or(0.0, |r| r.value);
    if last > factor * first.max(1e-300) && last > 0.0 {
        Verdict::GrowsUnbounded
    } else {
        Verdict::HoldsOnSample
    }
}

fn decay_verdict(table: &[GrowthRow], factor: f64) -> Verdict {
    let first = table.first().map_or(0.0, |r| r.value);
    let last = table.last().map_or(0.0, |r| r.value);
    if last <= factor * first + 1e-12 {
        Verdict::HoldsOnSample
    } else {
        Verdict::Fails
    }
}

/// Gradient-domination check `|grad V| <= C V^{3/2}`: estimates the best
/// constant as the sample maximum of `|grad V| / V^{3/2}` and tracks its
/// growth over nested radii.
pub fn check_gradv<T: Real>(v: &Potential<T>, grid: &Grid<T>) -> ConditionReport {
    check_gradv_with(v, grid, None, DEFAULT_GROWTH_FACTOR)
}

pub fn check_gradv_with<T: Real>(
    v: &Potential<T>,
    grid: &Grid<T>,
    radii: Option<Vec<T>>,
    growth_factor: f64,
) -> ConditionReport {
    let radii = radii.unwrap_or_else(|| quarter_radii(grid.radius()));
    let mut best = T::zero();
    let mut best_point = None;
    let mut per_radius = vec![T::zero(); radii.len()];
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let xs = &x[..grid.dim()];
        let val = v.eval(xs);
        let g = v.grad(xs);
        let ratio = norm(&g[..grid.dim()]) / val.powf(T::of(1.5));
        if ratio > best {
            best = ratio;
            best_point = Some(xs.to_vec());
        }
        let r = norm(xs);
        for (slot, &rad) in per_radius.iter_mut().zip(&radii) {
            if r <= rad && ratio > *slot {
                *slot = ratio;
            }
        }
    }
    let table: Vec<GrowthRow> = radii
        .iter()
        .zip(&per_radius)
        .map(|(&r, &v)| GrowthRow {
            radius: r.as_f64(),
            value: v.as_f64(),
        })
        .collect();
    let mut constants = BTreeMap::new();
    constants.insert("C".to_string(), best.as_f64());
    ConditionReport {
        condition: "gradV".to_string(),
        potential: v.name().to_string(),
        constants,
        max_point: best_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict: growth_verdict(&table, growth_factor),
        table,
        sample: sample_info(grid),
        fd_gradient_fallback: !v.has_analytic_gradient(),
    }
}

/// Two-potential domination `0 < c <= W <= C V^alpha`: estimates
/// `c = min W` and `C = max W / V^alpha` over the grid.
pub fn check_vw_alpha<T: Real>(
    v: &Potential<T>,
    w: &Potential<T>,
    alpha: T,
    grid: &Grid<T>,
) -> Result<ConditionReport> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::invalid("alpha", "must lie in (0, 1)"));
    }
    let radii = quarter_radii(grid.radius());
    let mut c_min = T::infinity();
    let mut c_max = T::zero();
    let mut best_point = None;
    let mut per_radius = vec![T::zero(); radii.len()];
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let xs = &x[..grid.dim()];
        let wv = w.eval(xs);
        let ratio = wv / v.eval(xs).powf(alpha);
        if wv < c_min {
            c_min = wv;
        }
        if ratio > c_max {
            c_max = ratio;
            best_point = Some(xs.to_vec());
        }
        let r = norm(xs);
        for (slot, &rad) in per_radius.iter_mut().zip(&radii) {
            if r <= rad && ratio > *slot {
                *slot = ratio;
            }
        }
    }
    let table: Vec<GrowthRow> = radii
        .iter()
        .zip(&per_radius)
        .map(|(&r, &v)| GrowthRow {
            radius: r.as_f64(),
            value: v.as_f64(),
        })
        .collect();
    let mut constants = BTreeMap::new();
    constants.insert("c".to_string(), c_min.as_f64());
    constants.insert("C".to_string(), c_max.as_f64());
    constants.insert("alpha".to_string(), alpha.as_f64());
    let verdict = if !(c_min > T::zero()) || !c_max.is_finite() {
        Verdict::Fails
    } else {
        growth_verdict(&table, DEFAULT_GROWTH_FACTOR)
    };
    Ok(ConditionReport {
        condition: "VW-alpha".to_string(),
        potential: format!("{} / {}", v.name(), w.name()),
        constants,
        max_point: best_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict,
        table,
        sample: sample_info(grid),
        fd_gradient_fallback: false,
    })
}

/// Dense deterministic lattice over the ball of radius `rho` around
/// `center`; visits `samples^dim` candidate points.
fn ball_lattice<T: Real>(center: &[T], rho: T, samples: usize, mut visit: impl FnMut(&[T], T)) {
    let dim = center.len();
    let n = samples.pow(dim as u32);
    let step = T::of(2.0) * rho / T::of((samples - 1) as f64);
    let mut x = vec![T::zero(); dim];
    for i in 0..n {
        let mut rem = i;
        let mut d2 = T::zero();
        for (d, xd) in x.iter_mut().enumerate() {
            let k = rem % samples;
            rem /= samples;
            let off = T::of(k as f64) * step - rho;
            *xd = center[d] + off;
            d2 += off * off;
        }
        if d2 <= rho * rho {
            visit(&x, d2.sqrt());
        }
    }
}

/// Per-center comparability `c1 V(x_n) <= V <= c2 V(x_n)` on the ball of
/// radius `m / sqrt(V(x_n))`. Reports the worst pair across centers and a
/// per-center `c2/c1` table.
pub fn check_v0<T: Real>(
    v: &Potential<T>,
    centers: &[Vec<T>],
    m: T,
    samples_per_axis: usize,
) -> Result<ConditionReport> {
    if centers.is_empty() {
        return Err(Error::invalid("centers", "need at least one center"));
    }
    if !(m > T::zero()) {
        return Err(Error::invalid("m", "radius scale must be positive"));
    }
    let mut worst_c1 = T::infinity();
    let mut worst_c2 = T::zero();
    let mut worst_point = None;
    let mut table = Vec::with_capacity(centers.len());
    let mut points = 0usize;
    let mut max_radius = T::zero();
    let mut spacing = T::zero();
    for center in centers {
        let vc = v.eval(center);
        let rho = m / vc.sqrt();
        let mut c1 = T::infinity();
        let mut c2 = T::zero();
        let mut c2_point = None;
        ball_lattice(center, rho, samples_per_axis, |x, _| {
            points += 1;
            let ratio = v.eval(x) / vc;
            if ratio < c1 {
                c1 = ratio;
            }
            if ratio > c2 {
                c2 = ratio;
                c2_point = Some(x.to_vec());
            }
        });
        let r = norm(center);
        if r + rho > max_radius {
            max_radius = r + rho;
        }
        spacing = T::of(2.0) * rho / T::of((samples_per_axis - 1) as f64);
        table.push(GrowthRow {
            radius: r.as_f64(),
            value: (c2 / c1).as_f64(),
        });
        if c1 < worst_c1 {
            worst_c1 = c1;
        }
        if c2 > worst_c2 {
            worst_c2 = c2;
            worst_point = c2_point;
        }
    }
    let mut constants = BTreeMap::new();
    constants.insert("c1".to_string(), worst_c1.as_f64());
    constants.insert("c2".to_string(), worst_c2.as_f64());
    constants.insert("m".to_string(), m.as_f64());
    let verdict = if worst_c1 > T::zero() && worst_c2.is_finite() {
        Verdict::HoldsOnSample
    } else {
        Verdict::Fails
    };
    Ok(ConditionReport {
        condition: "V0".to_string(),
        potential: v.name().to_string(),
        constants,
        max_point: worst_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict,
        table,
        sample: SampleInfo {
            max_radius: max_radius.as_f64(),
            points,
            spacing: spacing.as_f64(),
        },
        fd_gradient_fallback: false,
    })
}

/// Fixed direction fan used to place sample points at a given radius.
fn directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..8)
            .map(|k| {
                let a = std::f64::consts::PI / 4.0 * k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut dirs = Vec::new();
            for d in 0..3 {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; 3];
                    v[d] = s;
                    dirs.push(v);
                }
            }
            let c = 1.0 / 3.0_f64.sqrt();
            for sx in [c, -c] {
                for sy in [c, -c] {
                    for sz in [c, -c] {
                        dirs.push(vec![sx, sy, sz]);
                    }
                }
            }
            dirs
        }
    }
}

/// Asymptotic locally-Lipschitz check: at sample points `y` on each radius,
/// estimates `sup_{x != y, |x-y| <= m/sqrt(V(y))} |V(y)-V(x)|/|y-x|` divided
/// by `V^{3/2}(y)`, and renders the little-o claim as a decaying table.
pub fn check_v1<T: Real>(
    v: &Potential<T>,
    dim: usize,
    m: T,
    radii: &[T],
    samples_per_axis: usize,
) -> Result<ConditionReport> {
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "need at least two radii"));
    }
    if !(m > T::zero()) {
        return Err(Error::invalid("m", "radius scale must be positive"));
    }
    let dirs = directions(dim);
    let mut table = Vec::with_capacity(radii.len());
    let mut best_point = None;
    let mut best = T::zero();
    let mut points = 0usize;
    for &radius in radii {
        let mut worst = T::zero();
        for dir in &dirs {
            let y: Vec<T> = dir.iter().map(|&c| T::of(c) * radius).collect();
            let vy = v.eval(&y);
            let rho = m / vy.sqrt();
            let denom = vy.powf(T::of(1.5));
            ball_lattice(&y, rho, samples_per_axis, |x, dist| {
                points += 1;
                if dist > T::zero() {
                    let ratio = (vy - v.eval(x)).abs() / dist / denom;
                    if ratio > worst {
                        worst = ratio;
                    }
                    if ratio > best {
                        best = ratio;
                        best_point = Some(x.to_vec());
                    }
                }
            });
        }
        table.push(GrowthRow {
            radius: radius.as_f64(),
            value: worst.as_f64(),
        });
    }
    let mut constants = BTreeMap::new();
    constants.insert("m".to_string(), m.as_f64());
    constants.insert("max_ratio".to_string(), best.as_f64());
    Ok(ConditionReport {
        condition: "V1".to_string(),
        potential: v.name().to_string(),
        constants,
        max_point: best_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict: decay_verdict(&table, DEFAULT_DECAY_FACTOR),
        table,
        sample: SampleInfo {
            max_radius: radii.last().map_or(0.0, |r| r.as_f64()),
            points,
            spacing: 0.0,
        },
        fd_gradient_fallback: false,
    })
}

/// Gradient-envelope check: `sup_{B_eps(y)} |grad V| / V^{3/2}(y)` tabulated
/// at sample points on each radius; little-o rendered as table decay.
pub fn check_v2<T: Real>(
    v: &Potential<T>,
    dim: usize,
    eps: T,
    radii: &[T],
    samples_per_axis: usize,
) -> Result<ConditionReport> {
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "need at least two radii"));
    }
    if !(eps > T::zero()) {
        return Err(Error::invalid("eps", "ball radius must be positive"));
    }
    let dirs = directions(dim);
    let mut table = Vec::with_capacity(radii.len());
    let mut best = T::zero();
    let mut best_point = None;
    let mut points = 0usize;
    for &radius in radii {
        let mut worst = T::zero();
        for dir in &dirs {
            let y: Vec<T> = dir.iter().map(|&c| T::of(c) * radius).collect();
            let denom = v.eval(&y).powf(T::of(1.5));
            ball_lattice(&y, eps, samples_per_axis, |x, _| {
                points += 1;
                let g = v.grad(x);
                let ratio = norm(&g[..dim]) / denom;
                if ratio > worst {
                    worst = ratio;
                }
                if ratio > best {
                    best = ratio;
                    best_point = Some(x.to_vec());
                }
            });
        }
        table.push(GrowthRow {
            radius: radius.as_f64(),
            value: worst.as_f64(),
        });
    }
    let mut constants = BTreeMap::new();
    constants.insert("eps".to_string(), eps.as_f64());
    constants.insert("max_ratio".to_string(), best.as_f64());
    Ok(ConditionReport {
        condition: "V2".to_string(),
        potential: v.name().to_string(),
        constants,
        max_point: best_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict: decay_verdict(&table, DEFAULT_DECAY_FACTOR),
        table,
        sample: SampleInfo {
            max_radius: radii.last().map_or(0.0, |r| r.as_f64()),
            points,
            spacing: 0.0,
        },
        fd_gradient_fallback: !v.has_analytic_gradient(),
    })
}

/// Radial-pair envelope check
/// `W(x) <= C phi(x) V(x) |x|^{(N-1)(tau_bar - 2)/2}` beyond `r_tilde`:
/// estimates `C` as the sample maximum of the ratio, after verifying that
/// `phi` is positive and sampled-decreasing past `r_tilde`.
pub fn check_vw_rad<T: Real>(
    v: &Potential<T>,
    w: &Potential<T>,
    phi: &DecayFn<T>,
    tau_bar: T,
    r_tilde: T,
    grid: &Grid<T>,
) -> Result<ConditionReport> {
    if !v.is_radial() || !w.is_radial() {
        return Err(Error::invalid(
            "potentials",
            "radial condition requires radial V and W",
        ));
    }
    if !(tau_bar > T::of(2.0)) {
        return Err(Error::invalid("tau_bar", "must exceed 2"));
    }
    if !(r_tilde > T::zero()) || r_tilde >= grid.radius() {
        return Err(Error::invalid(
            "r_tilde",
            "must be positive and inside the grid radius",
        ));
    }
    phi.check_vanishing(r_tilde)?;
    let exponent = T::of((grid.dim() - 1) as f64) * (tau_bar - T::of(2.0)) / T::of(2.0);
    let mut c_max = T::zero();
    let mut best_point = None;
    let radii = quarter_radii(grid.radius());
    let mut per_radius = vec![T::zero(); radii.len()];
    let mut counted = 0usize;
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let xs = &x[..grid.dim()];
        let r = norm_sq(xs).sqrt();
        if r < r_tilde {
            continue;
        }
        counted += 1;
        let ratio = w.eval(xs) / (phi.eval(r) * v.eval(xs) * r.powf(exponent));
        if ratio > c_max {
            c_max = ratio;
            best_point = Some(xs.to_vec());
        }
        for (slot, &rad) in per_radius.iter_mut().zip(&radii) {
            if r <= rad && ratio > *slot {
                *slot = ratio;
            }
        }
    }
    if counted == 0 {
        return Err(Error::invalid(
            "r_tilde",
            "no grid nodes beyond the cutoff radius",
        ));
    }
    let table: Vec<GrowthRow> = radii
        .iter()
        .zip(&per_radius)
        .map(|(&r, &v)| GrowthRow {
            radius: r.as_f64(),
            value: v.as_f64(),
        })
        .collect();
    let mut constants = BTreeMap::new();
    constants.insert("C".to_string(), c_max.as_f64());
    constants.insert("tau_bar".to_string(), tau_bar.as_f64());
    constants.insert("r_tilde".to_string(), r_tilde.as_f64());
    Ok(ConditionReport {
        condition: "VW-rad".to_string(),
        potential: format!("{} / {} / {}", v.name(), w.name(), phi.name()),
        constants,
        max_point: best_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict: growth_verdict(&table, DEFAULT_GROWTH_FACTOR),
        table,
        sample: sample_info(grid),
        fd_gradient_fallback: false,
    })
}

/// Membership in the base class: `V >= v0 > 0` at every grid node, for the
/// potential's declared lower bound.
pub fn check_cstar<T: Real>(v: &Potential<T>, grid: &Grid<T>) -> ConditionReport {
    let mut min_val = T::infinity();
    let mut min_point = None;
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let val = v.eval(&x[..grid.dim()]);
        if val < min_val {
            min_val = val;
            min_point = Some(x[..grid.dim()].to_vec());
        }
    }
    let mut constants = BTreeMap::new();
    constants.insert("min".to_string(), min_val.as_f64());
    constants.insert("v0".to_string(), v.lower_bound().as_f64());
    let verdict = if min_val >= v.lower_bound() && min_val > T::zero() {
        Verdict::HoldsOnSample
    } else {
        Verdict::Fails
    };
    ConditionReport {
        condition: "C-star".to_string(),
        potential: v.name().to_string(),
        constants,
        max_point: min_point.map(|p| p.iter().map(|c| c.as_f64()).collect()),
        verdict,
        table: Vec::new(),
        sample: sample_info(grid),
        fd_gradient_fallback: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::potential::{
        make_annular_step, make_constant, make_exponential, make_oscillating, make_power,
    };

    fn grid(dim: usize, r: f64, m: usize) -> Grid<f64> {
        Grid::new(dim, r, m).unwrap()
    }

    #[test]
    fn gradv_constant_potential_is_zero() {
        let v = make_constant(1.0).unwrap();
        let rep = check_gradv(&v, &grid(2, 4.0, 33));
        assert_eq!(rep.constant("C"), Some(0.0));
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
        assert!(!rep.fd_gradient_fallback);
    }

    #[test]
    fn gradv_power_converges_to_closed_form() {
        // 1-D closed-form maximization of 2r(1+r^2)^{-3/2}: max 4/(3 sqrt 3)
        // at r = 1/sqrt(2); the node (0.5, 0.5) sits exactly on that circle.
        let target = 4.0 / (3.0 * 3.0_f64.sqrt());
        let v = make_power(2.0).unwrap();
        let c129 = check_gradv(&v, &grid(2, 4.0, 129)).constant("C").unwrap();
        let c257 = check_gradv(&v, &grid(2, 4.0, 257)).constant("C").unwrap();
        assert!((c129 - target).abs() / target < 0.01);
        assert!((c257 - target).abs() / target < 0.01);
        assert!((c257 - target).abs() <= (c129 - target).abs() + 1e-12);
    }

    #[test]
    fn gradv_oscillating_grows_unbounded() {
        let v = make_oscillating::<f64>();
        let r5 = check_gradv(&v, &grid(2, 5.0, 129));
        let r10 = check_gradv(&v, &grid(2, 10.0, 257));
        assert_eq!(r5.verdict, Verdict::GrowsUnbounded);
        assert_eq!(r10.verdict, Verdict::GrowsUnbounded);
        // the estimate keeps exploding between R=5 and R=10
        assert!(r10.constant("C").unwrap() > 10.0 * r5.constant("C").unwrap());
    }

    #[test]
    fn vw_alpha_examples() {
        let g = grid(2, 6.0, 65);
        let v = make_power(2.0).unwrap();
        let w1 = make_constant(1.0).unwrap();
        let rep = check_vw_alpha(&v, &w1, 0.5, &g).unwrap();
        assert!((rep.constant("c").unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.constant("C").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
        // max of W/V^alpha attained at the origin
        let p = rep.max_point.unwrap();
        assert!(p.iter().all(|c| c.abs() < 1e-12));

        // W = V: the ratio is V^{1/2}, growing with the radius
        let rep = check_vw_alpha(&v, &v, 0.5, &g).unwrap();
        assert_eq!(rep.verdict, Verdict::GrowsUnbounded);

        // V = 1 + |x|^4 dominates W = 1 + |x|^2 at alpha = 1/2
        let v4 = make_power(4.0).unwrap();
        let rep = check_vw_alpha(&v4, &v, 0.5, &g).unwrap();
        assert!(rep.constant("C").unwrap() <= 2.0);
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);

        assert!(check_vw_alpha(&v, &w1, 1.0, &g).is_err());
    }

    #[test]
    fn v0_constant_potential() {
        let v = make_constant(5.0).unwrap();
        let centers = vec![vec![0.0, 0.0], vec![3.0, 1.0]];
        let rep = check_v0(&v, &centers, 1.0, 9).unwrap();
        assert_eq!(rep.constant("c1"), Some(1.0));
        assert_eq!(rep.constant("c2"), Some(1.0));
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
    }

    #[test]
    fn v0_power_ratio_tends_to_one() {
        // shrinking-ball oracle: on B_{1/sqrt(V)}(x_n) the extreme ratios are
        // V(|x_n| +/- rho)/V(x_n), which tend to 1 as |x_n| grows
        let v = make_power(2.0).unwrap();
        let centers: Vec<Vec<f64>> = (1..=6).map(|k| vec![f64::powi(2.0, k), 0.0]).collect();
        let rep = check_v0(&v, &centers, 1.0, 17).unwrap();
        let ratios: Vec<f64> = rep.table.iter().map(|r| r.value).collect();
        assert!(ratios.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        assert!(*ratios.last().unwrap() < 1.1);
        // closed-form check at the far center
        let xn: f64 = 64.0;
        let vc = 1.0 + xn * xn;
        let rho = 1.0 / vc.sqrt();
        let expect = (1.0 + (xn + rho).powi(2)) / (1.0 + (xn - rho).powi(2));
        assert!((ratios.last().unwrap() - expect).abs() < 0.02 * expect);
    }

    #[test]
    fn v0_oscillating_ratio_does_not_stabilize() {
        let v = make_oscillating::<f64>();
        let centers: Vec<Vec<f64>> = (2..=6).map(|k| vec![f64::powi(2.0, k), 0.0]).collect();
        let rep = check_v0(&v, &centers, 1.0, 17).unwrap();
        // the oscillation sweeps a full period inside every shrinking ball,
        // so c2/c1 stays near 3 instead of approaching 1
        assert!(rep.table.iter().all(|row| row.value > 2.0));
    }

    #[test]
    fn v1_tables() {
        let radii = [4.0, 8.0, 16.0, 32.0];
        let v1 = check_v1(&make_constant(1.0).unwrap(), 2, 1.0, &radii, 9).unwrap();
        assert_eq!(v1.verdict, Verdict::HoldsOnSample);
        assert!(v1.table.iter().all(|r| r.value == 0.0));

        let v = make_power(2.0).unwrap();
        let rep = check_v1(&v, 2, 1.0, &radii, 9).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
        let vals: Vec<f64> = rep.table.iter().map(|r| r.value).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));

        let osc = make_oscillating::<f64>();
        let rep = check_v1(&osc, 2, 1.0, &[2.0, 4.0, 6.0, 8.0], 9).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        let vals: Vec<f64> = rep.table.iter().map(|r| r.value).collect();
        assert!(vals.last().unwrap() > vals.first().unwrap());
    }

    #[test]
    fn v2_tables() {
        let radii = [4.0_f64, 6.0, 8.0, 12.0];
        let rep = check_v2(&make_constant(1.0).unwrap(), 2, 1.0, &radii, 9).unwrap();
        assert!(rep.table.iter().all(|r| r.value == 0.0));
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);

        // sup|grad V| ~ 2(|y|+1), V^{3/2} ~ |y|^3: decay like 1/|y|^2
        let v = make_power(2.0).unwrap();
        let rep = check_v2(&v, 2, 1.0, &radii, 9).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
        let vals: Vec<f64> = rep.table.iter().map(|r| r.value).collect();
        for (row, &radius) in vals.iter().zip(&radii) {
            let envelope = 2.0 * (radius + 1.0) / (1.0 + (radius - 1.0).powi(2)).powf(1.5);
            assert!(*row <= envelope * 1.05, "{row} vs {envelope}");
        }

        // exponential potential decays like e^{-|y|/2} up to constants
        let e = make_exponential(1.0).unwrap();
        let rep = check_v2(&e, 2, 0.1, &[3.0, 4.0, 5.0, 6.0], 9).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);
        let vals: Vec<f64> = rep.table.iter().map(|r| r.value).collect();
        for w in vals.windows(2) {
            let drop = w[1] / w[0];
            // consecutive radii differ by 1: expect roughly e^{-1/2} = 0.6065
            assert!(drop < 0.75 && drop > 0.45, "drop {drop}");
        }
    }

    #[test]
    fn vw_rad_examples() {
        let g = grid(2, 8.0, 65);
        let one = make_constant(1.0).unwrap();
        let phi = DecayFn::inverse_power(1.0).unwrap();
        // W = V = 1, phi = (1+r)^{-1}, tau_bar = 4, N = 2: ratio (1+r)/r <= 2 for r >= 1
        let rep = check_vw_rad(&one, &one, &phi, 4.0, 1.0, &g).unwrap();
        assert!(rep.constant("C").unwrap() <= 2.0 + 1e-9);
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);

        // coercive pair with phi = (1+r)^{-1/2} and exponent >= 1 stays bounded
        let v = make_power(2.0).unwrap();
        let phi_half = DecayFn::inverse_power(0.5).unwrap();
        let rep = check_vw_rad(&v, &v, &phi_half, 4.0, 1.0, &g).unwrap();
        assert!(rep.constant("C").unwrap().is_finite());
        assert_eq!(rep.verdict, Verdict::HoldsOnSample);

        // phi = 1 violates the vanishing precondition
        let flat = DecayFn::new("one", |_: f64| 1.0);
        assert!(matches!(
            check_vw_rad(&one, &one, &flat, 4.0, 1.0, &g),
            Err(Error::NotVanishing(_))
        ));
    }

    #[test]
    fn catalog_passes_cstar() {
        let g = grid(2, 9.0, 65);
        for v in [
            make_power(2.0).unwrap(),
            make_exponential(0.5).unwrap(),
            make_oscillating::<f64>(),
            make_annular_step::<f64>(),
        ] {
            let rep = check_cstar(&v, &g);
            assert_eq!(rep.verdict, Verdict::HoldsOnSample, "{}", v.name());
        }
    }
}
