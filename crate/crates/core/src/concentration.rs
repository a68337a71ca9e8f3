//! Concentration-compactness diagnostics along a minimizing trajectory.
//!
//! Each snapshot field induces the positive measure with node density
//! `(1/2 - alpha)(|grad u|^2 + V u^2) + (alpha(p+3) - 1)/(p+1) ||u||_2^2 V |u|^{p+1}`
//! for a weight `alpha` in `(1/(p+3), 1/2)`. The concentration function
//! `Q(r) = max_xi nu(B_r(xi))` over a lattice of candidate centers
//! classifies the trajectory into the concentration / vanishing / dichotomy
//! trichotomy, heuristically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{gradient, Grid, ScalarField, SharedGrid};
use crate::nehari::NehariState;
use crate::potential::Potential;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrichotomyLabel {
    Concentration,
    Vanishing,
    Dichotomy,
}

#[derive(Debug, Clone, Serialize)]
pub struct QEntry {
    pub radius: f64,
    pub q: f64,
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub total: f64,
    pub entries: Vec<QEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationTrace {
    pub alpha: f64,
    pub rows: Vec<TraceRow>,
    pub label: TrichotomyLabel,
    /// Largest distance from the origin of a maximizing center among the
    /// late rows (last third), at the labeling radius.
    pub max_center_radius_late: f64,
}

#[derive(Debug, Clone)]
pub struct ConcentrationOpts<T> {
    /// Defaults to the midpoint of the admissible interval
    /// `(1/(p+3), 1/2)`.
    pub alpha: Option<T>,
    /// Defaults to `{R/16, R/8, R/4, R/2}`.
    pub radii: Option<Vec<T>>,
    /// Candidate centers: grid nodes subsampled every this many nodes.
    pub lattice_stride: usize,
}

impl<T> Default for ConcentrationOpts<T> {
    fn default() -> Self {
        ConcentrationOpts {
            alpha: None,
            radii: None,
            lattice_stride: 4,
        }
    }
}

/// Fraction of the total measure a single ball must capture for the
/// concentration label.
pub const CONCENTRATION_FRACTION: f64 = 0.9;
/// Below this fraction at the largest ladder radius the row counts as
/// vanished.
pub const VANISHING_FRACTION: f64 = 0.05;

/// Per-snapshot density values times quadrature weights.
fn measure_density<T: Real>(
    u: &ScalarField<T>,
    v_vals: &[T],
    p: T,
    alpha: T,
) -> (Vec<T>, T) {
    let grid = u.grid();
    let grad_sq = gradient(u).magnitude_sq();
    let b = {
        let mut acc = T::zero();
        for (&w, &x) in grid.weights().iter().zip(u.values()) {
            acc += w * x * x;
        }
        acc
    };
    let c1 = T::of(0.5) - alpha;
    let c2 = (alpha * (p + T::of(3.0)) - T::one()) / (p + T::one()) * b;
    let mut dens = Vec::with_capacity(grid.num_nodes());
    let mut total = T::zero();
    for i in 0..grid.num_nodes() {
        let x = u.values()[i];
        let d = c1 * (grad_sq.values()[i] + v_vals[i] * x * x)
            + c2 * v_vals[i] * x.abs().powf(p + T::one());
        let wd = grid.weights()[i] * d;
        dens.push(wd);
        total += wd;
    }
    (dens, total)
}

/// Smallest axis index whose offset is `>= lo` (matches a direct coordinate
/// comparison, fixing up floating-point ceil).
fn first_index_at_least<T: Real>(grid: &Grid<T>, lo: T) -> usize {
    let m = grid.nodes_per_axis();
    let h = grid.spacing();
    let r = grid.radius();
    let approx = ((lo + r) / h).ceil().as_f64().max(0.0) as usize;
    let mut k = approx.min(m);
    let coord = |k: usize| T::of(k as f64) * h - r;
    while k > 0 && coord(k - 1) >= lo {
        k -= 1;
    }
    while k < m && coord(k) < lo {
        k += 1;
    }
    k
}

/// Largest axis index whose offset is `<= hi`, plus one (exclusive).
fn end_index_at_most<T: Real>(grid: &Grid<T>, hi: T) -> usize {
    let m = grid.nodes_per_axis();
    let h = grid.spacing();
    let r = grid.radius();
    let approx = ((hi + r) / h).floor().as_f64().max(-1.0) as isize + 1;
    let mut k = approx.clamp(0, m as isize) as usize;
    let coord = |k: usize| T::of(k as f64) * h - r;
    while k < m && coord(k) <= hi {
        k += 1;
    }
    while k > 0 && coord(k - 1) > hi {
        k -= 1;
    }
    k
}

/// Ball sums on a 2-D grid via per-row prefix sums; exact and fast.
struct BallSums2d<T> {
    prefix: Vec<T>, // (m) x (m+1), prefix[i][j] = sum of dens in row i, cols < j
    m: usize,
}

impl<T: Real> BallSums2d<T> {
    fn new(grid: &Grid<T>, dens: &[T]) -> Self {
        let m = grid.nodes_per_axis();
        let mut prefix = vec![T::zero(); m * (m + 1)];
        for i in 0..m {
            let mut acc = T::zero();
            for j in 0..m {
                acc += dens[i * m + j];
                prefix[i * (m + 1) + j + 1] = acc;
            }
        }
        BallSums2d { prefix, m }
    }

    fn row_segment(&self, row: usize, j_lo: usize, j_end: usize) -> T {
        self.prefix[row * (self.m + 1) + j_end] - self.prefix[row * (self.m + 1) + j_lo]
    }

    /// `sum` of the density over nodes with `|x - xi| <= r`.
    fn ball(&self, grid: &Grid<T>, xi: &[T], r: T) -> T {
        let i_lo = first_index_at_least(grid, xi[0] - r);
        let i_end = end_index_at_most(grid, xi[0] + r);
        let h = grid.spacing();
        let rad = grid.radius();
        let mut acc = T::zero();
        for i in i_lo..i_end {
            let dx = T::of(i as f64) * h - rad - xi[0];
            let rem = r * r - dx * dx;
            if rem < T::zero() {
                continue;
            }
            let chord = rem.sqrt();
            let j_lo = first_index_at_least(grid, xi[1] - chord);
            let j_end = end_index_at_most(grid, xi[1] + chord);
            if j_end > j_lo {
                acc += self.row_segment(i, j_lo, j_end);
            }
        }
        acc
    }

    /// Axis-aligned square sum, an upper bound for the ball sum when the
    /// density is nonnegative (used to prune the center scan).
    fn square(&self, grid: &Grid<T>, xi: &[T], r: T) -> T {
        let i_lo = first_index_at_least(grid, xi[0] - r);
        let i_end = end_index_at_most(grid, xi[0] + r);
        let j_lo = first_index_at_least(grid, xi[1] - r);
        let j_end = end_index_at_most(grid, xi[1] + r);
        let mut acc = T::zero();
        for i in i_lo..i_end {
            if j_end > j_lo {
                acc += self.row_segment(i, j_lo, j_end);
            }
        }
        acc
    }
}

/// Direct ball sum for dimensions 1 and 3.
fn ball_direct<T: Real>(grid: &Grid<T>, dens: &[T], xi: &[T], r: T) -> T {
    let mut acc = T::zero();
    for (i, &d) in dens.iter().enumerate() {
        let x = grid.node(i);
        let mut d2 = T::zero();
        for (dim, &c) in xi.iter().enumerate() {
            let diff = x[dim] - c;
            d2 += diff * diff;
        }
        if d2 <= r * r {
            acc += d;
        }
    }
    acc
}

fn lattice_centers<T: Real>(grid: &SharedGrid<T>, stride: usize) -> Vec<Vec<T>> {
    let m = grid.nodes_per_axis();
    let picks: Vec<usize> = (0..m).step_by(stride.max(1)).collect();
    let dim = grid.dim();
    let mut centers = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let mut c = Vec::with_capacity(dim);
        for d in 0..dim {
            let k = picks[idx[d]];
            c.push(T::of(k as f64) * grid.spacing() - grid.radius());
        }
        centers.push(c);
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < picks.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dim {
                return centers;
            }
        }
    }
}

/// Concentration trace over the snapshot states of a trajectory.
pub fn concentration_trace<T: Real>(
    trajectory: &[NehariState<T>],
    v: &Potential<T>,
    p: T,
    opts: &ConcentrationOpts<T>,
) -> Result<ConcentrationTrace> {
    let snapshots: Vec<&NehariState<T>> = trajectory
        .iter()
        .filter(|s| s.field.is_some())
        .collect();
    let first = snapshots
        .first()
        .ok_or_else(|| Error::invalid("trajectory", "no snapshot fields"))?;
    let grid = first.field.as_ref().unwrap().grid().clone();

    let lo = T::one() / (p + T::of(3.0));
    let hi = T::of(0.5);
    let alpha = opts.alpha.unwrap_or((lo + hi) * T::of(0.5));
    if !(alpha > lo && alpha < hi) {
        return Err(Error::invalid(
            "alpha",
            format!(
                "must lie in ({}, 0.5), got {}",
                lo.as_f64(),
                alpha.as_f64()
            ),
        ));
    }
    let radii = opts.radii.clone().unwrap_or_else(|| {
        [16.0, 8.0, 4.0, 2.0]
            .iter()
            .map(|&d| grid.radius() / T::of(d))
            .collect()
    });
    let centers = lattice_centers(&grid, opts.lattice_stride);
    let v_field = ScalarField::sample(&grid, |x| v.eval(x))?;

    let mut rows = Vec::with_capacity(snapshots.len());
    for state in &snapshots {
        let u = state.field.as_ref().unwrap();
        if !u.grid().same_layout(&grid) {
            return Err(Error::GridMismatch);
        }
        let (dens, total) = measure_density(u, v_field.values(), p, alpha);
        let fast2d = (grid.dim() == 2).then(|| BallSums2d::new(&grid, &dens));
        let mut entries = Vec::with_capacity(radii.len());
        for &r in &radii {
            let mut best_q = T::neg_infinity();
            let mut best_center: &[T] = &centers[0];
            for c in &centers {
                match &fast2d {
                    Some(fb) => {
                        // prune with the cheap square upper bound
                        if fb.square(&grid, c, r) <= best_q {
                            continue;
                        }
                        let q = fb.ball(&grid, c, r);
                        if q > best_q {
                            best_q = q;
                            best_center = c;
                        }
                    }
                    None => {
                        let q = ball_direct(&grid, &dens, c, r);
                        if q > best_q {
                            best_q = q;
                            best_center = c;
                        }
                    }
                }
            }
            entries.push(QEntry {
                radius: r.as_f64(),
                q: best_q.max(T::zero()).as_f64(),
                center: best_center.iter().map(|c| c.as_f64()).collect(),
            });
        }
        rows.push(TraceRow {
            iter: state.iter,
            total: total.as_f64(),
            entries,
        });
    }

    // label from the last row; center boundedness over the late rows
    let last = rows.last().expect("at least one snapshot");
    let conc_idx = last
        .entries
        .iter()
        .position(|e| e.q >= CONCENTRATION_FRACTION * last.total);
    let late_start = rows.len().saturating_sub(rows.len().div_ceil(3));
    let late_rows = &rows[late_start..];
    let center_radius = |e: &QEntry| e.center.iter().map(|c| c * c).sum::<f64>().sqrt();
    let label = if let Some(idx) = conc_idx {
        let max_center = late_rows
            .iter()
            .filter_map(|row| row.entries.get(idx))
            .map(center_radius)
            .fold(0.0, f64::max);
        if max_center <= grid.radius().as_f64() / 2.0 {
            TrichotomyLabel::Concentration
        } else {
            TrichotomyLabel::Dichotomy
        }
    } else {
        let q_last = last.entries.last().map_or(0.0, |e| e.q);
        if q_last <= VANISHING_FRACTION * last.total {
            TrichotomyLabel::Vanishing
        } else {
            TrichotomyLabel::Dichotomy
        }
    };
    let label_idx = conc_idx.unwrap_or(last.entries.len().saturating_sub(1));
    let max_center_radius_late = late_rows
        .iter()
        .filter_map(|row| row.entries.get(label_idx))
        .map(center_radius)
        .fold(0.0, f64::max);
    Ok(ConcentrationTrace {
        alpha: alpha.as_f64(),
        rows,
        label,
        max_center_radius_late,
    })
}

/// Total measure of a field (diagnostic parity with the trace rows).
pub fn total_measure<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    p: T,
    alpha: T,
) -> Result<T> {
    let v_field = ScalarField::sample(u.grid(), |x| v.eval(x))?;
    let (_, total) = measure_density(u, v_field.values(), p, alpha);
    Ok(total)
}

/// Wrap a bare field as a single-snapshot trajectory state.
pub fn snapshot_state<T: Real>(u: &ScalarField<T>, v: &Potential<T>, p: T) -> NehariState<T> {
    let f = crate::nehari::NlsFunctional::new(u.grid(), v, v, p)
        .expect("p > 1 checked by caller");
    let c = f.components(u);
    NehariState {
        iter: 0,
        energy_sq: c.a,
        mass_sq: c.b,
        nonlinear: c.d,
        i_value: f.i_of(&c),
        j_value: f.j_of(&c),
        grad_norm: T::nan(),
        field: Some(u.clone()),
    }
}
