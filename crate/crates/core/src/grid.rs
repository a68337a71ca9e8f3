//! Uniform tensor grids on truncated boxes, trapezoidal quadrature, and
//! finite-difference operators.
//!
//! A `Grid` covers the box `center + [-R, R]^N` with `M` nodes per axis
//! (`M` odd, so the box center is a node). All integrals are trapezoidal
//! tensor sums; derivatives are second-order finite differences. Values
//! outside the box are treated as zero where a stencil needs them
//! (homogeneous Dirichlet truncation).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grids are shared by the fields living on them.
pub type SharedGrid<T> = Arc<Grid<T>>;

#[derive(Debug)]
pub struct Grid<T> {
    dim: usize,
    radius: T,
    nodes_per_axis: usize,
    spacing: T,
    center: [T; 3],
    axis_offsets: Vec<T>,
    axis_weights: Vec<T>,
    node_weights: Vec<T>,
    strides: [usize; 3],
}

impl<T: Real> Grid<T> {
    /// Grid centered at the origin.
    pub fn new(dim: usize, radius: T, nodes_per_axis: usize) -> Result<Self> {
        Self::centered(dim, radius, nodes_per_axis, [T::zero(); 3])
    }

    /// Grid centered at an arbitrary point (used by per-bump local grids).
    pub fn centered(
        dim: usize,
        radius: T,
        nodes_per_axis: usize,
        center: [T; 3],
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::BadDimension(dim));
        }
        #[allow(clippy::manual_is_multiple_of)]
        if nodes_per_axis < 3 || nodes_per_axis % 2 == 0 {
            return Err(Error::BadNodesPerAxis(nodes_per_axis));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::BadRadius(radius.as_f64()));
        }
        let m = nodes_per_axis;
        let spacing = (T::of(2.0) * radius) / T::of((m - 1) as f64);
        let mut axis_offsets = Vec::with_capacity(m);
        for k in 0..m {
            axis_offsets.push(T::of(k as f64) * spacing - radius);
        }
        // Force exact symmetry so the midpoint is exactly the center.
        axis_offsets[m / 2] = T::zero();
        axis_offsets[m - 1] = radius;
        let mut axis_weights = vec![spacing; m];
        axis_weights[0] = spacing * T::of(0.5);
        axis_weights[m - 1] = spacing * T::of(0.5);

        let mut strides = [0usize; 3];
        for d in 0..dim {
            strides[d] = m.pow((dim - 1 - d) as u32);
        }
        let n = m.pow(dim as u32);
        let mut node_weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut w = T::one();
            for d in 0..dim {
                w *= axis_weights[(i / strides[d]) % m];
            }
            node_weights.push(w);
        }
        Ok(Grid {
            dim,
            radius,
            nodes_per_axis,
            spacing,
            center,
            axis_offsets,
            axis_weights,
            node_weights,
            strides,
        })
    }

    pub fn shared(self) -> SharedGrid<T> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn center(&self) -> &[T] {
        &self.center[..self.dim]
    }

    pub fn num_nodes(&self) -> usize {
        self.node_weights.len()
    }

    /// Per-node trapezoidal quadrature weights.
    pub fn weights(&self) -> &[T] {
        &self.node_weights
    }

    /// Volume element `h^N` (weight of an interior node).
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    #[inline]
    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.strides[axis]) % self.nodes_per_axis
    }

    /// Absolute coordinates of a node. Components beyond `dim` are zero.
    #[inline]
    pub fn node(&self, i: usize) -> [T; 3] {
        let mut x = [T::zero(); 3];
        for d in 0..self.dim {
            x[d] = self.center[d] + self.axis_offsets[self.axis_index(i, d)];
        }
        x
    }

    /// Distance of a node from the coordinate origin.
    pub fn node_radius(&self, i: usize) -> T {
        let x = self.node(i);
        crate::scalar::norm(&x[..self.dim])
    }

    pub fn same_layout(&self, other: &Grid<T>) -> bool {
        self.dim == other.dim
            && self.nodes_per_axis == other.nodes_per_axis
            && self.radius == other.radius
            && self.center == other.center
    }

    /// Same box, `2M - 1` nodes per axis (halved spacing).
    pub fn refined(&self) -> Result<Self> {
        Self::centered(
            self.dim,
            self.radius,
            2 * self.nodes_per_axis - 1,
            self.center,
        )
    }
}

/// Node-indexed real values on a grid.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    grid: SharedGrid<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    /// Evaluate a pointwise function at every node. Non-finite values are
    /// rejected with the offending coordinate.
    pub fn sample<F>(grid: &SharedGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> T,
    {
        let mut values = Vec::with_capacity(grid.num_nodes());
        for i in 0..grid.num_nodes() {
            let x = grid.node(i);
            let v = f(&x[..grid.dim()]);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    coords: x[..grid.dim()].iter().map(|c| c.as_f64()).collect(),
                });
            }
            values.push(v);
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_values(grid: &SharedGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::invalid(
                "values",
                format!(
                    "expected {} node values, got {}",
                    grid.num_nodes(),
                    values.len()
                ),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let x = grid.node(i);
            return Err(Error::NonFiniteSample {
                coords: x[..grid.dim()].iter().map(|c| c.as_f64()).collect(),
            });
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub(crate) fn from_values_unchecked(grid: &SharedGrid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.num_nodes());
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn constant(grid: &SharedGrid<T>, c: T) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![c; grid.num_nodes()],
        }
    }

    pub fn zeros(grid: &SharedGrid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> &SharedGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scaled(&self, c: T) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// `self + c * other` on a shared grid.
    pub fn add_scaled(&self, c: T, other: &Self) -> Result<Self> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Ok(ScalarField {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// `N` real components per node (holds discrete gradients).
#[derive(Debug, Clone)]
pub struct VectorField<T> {
    grid: SharedGrid<T>,
    components: Vec<Vec<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn grid(&self) -> &SharedGrid<T> {
        &self.grid
    }

    pub fn component(&self, d: usize) -> &[T] {
        &self.components[d]
    }

    /// Pointwise squared length, as a scalar field.
    pub fn magnitude_sq(&self) -> ScalarField<T> {
        let n = self.grid.num_nodes();
        let mut values = vec![T::zero(); n];
        for comp in &self.components {
            for (v, &g) in values.iter_mut().zip(comp) {
                *v += g * g;
            }
        }
        ScalarField::from_values_unchecked(&self.grid, values)
    }

    pub fn max_magnitude(&self) -> T {
        let mag = self.magnitude_sq();
        mag.values().iter().fold(T::zero(), |acc, &v| acc.max(v)).sqrt()
    }
}

/// Trapezoidal tensor quadrature: `sum_i w_i f_i`. Sequential fixed order,
/// so results are bit-reproducible.
pub fn integrate<T: Real>(f: &ScalarField<T>) -> T {
    f.grid
        .weights()
        .iter()
        .zip(&f.values)
        .fold(T::zero(), |acc, (&w, &v)| acc + w * v)
}

/// Quadrature inner product `sum_i w_i a_i b_i` of two fields sharing a grid.
pub fn inner_product<T: Real>(a: &ScalarField<T>, b: &ScalarField<T>) -> T {
    assert!(
        a.grid().same_layout(b.grid()),
        "inner product needs a shared grid"
    );
    wdot(a.grid(), a.values(), b.values())
}

/// Weighted inner product `sum_i w_i a_i b_i` over a grid's quadrature weights.
pub(crate) fn wdot<T: Real>(grid: &Grid<T>, a: &[T], b: &[T]) -> T {
    grid.weights()
        .iter()
        .zip(a.iter().zip(b))
        .fold(T::zero(), |acc, (&w, (&x, &y))| acc + w * x * y)
}

/// Central differences in the interior, one-sided second-order stencils at
/// the box faces.
pub fn gradient<T: Real>(u: &ScalarField<T>) -> VectorField<T> {
    let grid = u.grid();
    let m = grid.nodes_per_axis();
    let h = grid.spacing();
    let inv2h = T::one() / (T::of(2.0) * h);
    let vals = u.values();
    let mut components = Vec::with_capacity(grid.dim());
    for d in 0..grid.dim() {
        let stride = grid.strides[d];
        let mut comp = vec![T::zero(); grid.num_nodes()];
        for i in 0..grid.num_nodes() {
            let k = grid.axis_index(i, d);
            comp[i] = if k == 0 {
                (-T::of(3.0) * vals[i] + T::of(4.0) * vals[i + stride]
                    - vals[i + 2 * stride])
                    * inv2h
            } else if k == m - 1 {
                (T::of(3.0) * vals[i] - T::of(4.0) * vals[i - stride]
                    + vals[i - 2 * stride])
                    * inv2h
            } else {
                (vals[i + stride] - vals[i - stride]) * inv2h
            };
        }
        components.push(comp);
    }
    VectorField {
        grid: Arc::clone(grid),
        components,
    }
}

pub(crate) fn lap5_into<T: Real>(grid: &Grid<T>, u: &[T], out: &mut [T]) {
    let m = grid.nodes_per_axis();
    let h2 = grid.spacing() * grid.spacing();
    let two = T::of(2.0);
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for d in 0..grid.dim() {
            let stride = grid.strides[d];
            let k = grid.axis_index(i, d);
            let left = if k > 0 { u[i - stride] } else { T::zero() };
            let right = if k < m - 1 { u[i + stride] } else { T::zero() };
            acc += left + right - two * u[i];
        }
        *o = acc / h2;
    }
}

/// Standard `(2N+1)`-point Laplacian with zero Dirichlet closure outside
/// the box.
pub fn laplacian<T: Real>(u: &ScalarField<T>) -> ScalarField<T> {
    let mut out = vec![T::zero(); u.grid().num_nodes()];
    lap5_into(u.grid(), u.values(), &mut out);
    ScalarField::from_values_unchecked(u.grid(), out)
}

/// Fourth-order reference Laplacian (wide stencil in the interior, the
/// standard 3-point stencil within two nodes of a face, zero Dirichlet
/// closure). Used to measure how well a field satisfies a PDE beyond the
/// second-order stencil it was computed with.
pub fn laplacian_ref4<T: Real>(u: &ScalarField<T>) -> ScalarField<T> {
    let grid = u.grid();
    let m = grid.nodes_per_axis();
    let h2 = grid.spacing() * grid.spacing();
    let vals = u.values();
    let c = [
        T::of(-1.0 / 12.0),
        T::of(16.0 / 12.0),
        T::of(-30.0 / 12.0),
        T::of(16.0 / 12.0),
        T::of(-1.0 / 12.0),
    ];
    let two = T::of(2.0);
    let mut out = vec![T::zero(); grid.num_nodes()];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for d in 0..grid.dim() {
            let stride = grid.strides[d];
            let k = grid.axis_index(i, d);
            if k >= 2 && k + 3 <= m {
                acc += c[0] * vals[i - 2 * stride]
                    + c[1] * vals[i - stride]
                    + c[2] * vals[i]
                    + c[3] * vals[i + stride]
                    + c[4] * vals[i + 2 * stride];
            } else {
                let left = if k > 0 { vals[i - stride] } else { T::zero() };
                let right = if k < m - 1 { vals[i + stride] } else { T::zero() };
                acc += left + right - two * vals[i];
            }
        }
        *o = acc / h2;
    }
    ScalarField::from_values_unchecked(grid, out)
}

/// `H^1` seminorm squared over interior cell edges: the squared forward
/// difference on each edge, midpoint rule in the edge direction, trapezoid
/// weights transversally. Constant fields have zero energy.
pub fn grad_energy<T: Real>(u: &ScalarField<T>) -> T {
    let grid = u.grid();
    let m = grid.nodes_per_axis();
    let h = grid.spacing();
    let vals = u.values();
    let mut total = T::zero();
    for d in 0..grid.dim() {
        let stride = grid.strides[d];
        for i in 0..grid.num_nodes() {
            let k = grid.axis_index(i, d);
            if k == m - 1 {
                continue;
            }
            let diff = (vals[i + stride] - vals[i]) / h;
            // transverse trapezoid weights, edge length h along axis d
            let mut w = h;
            for dt in 0..grid.dim() {
                if dt != d {
                    w *= grid.axis_weights[grid.axis_index(i, dt)];
                }
            }
            total += w * diff * diff;
        }
    }
    total
}

/// Dirichlet form of the 5-point Laplacian: `h^N * sum_edges (du/h)^2`
/// including the ghost edges to the zero extension outside the box.
/// Satisfies `dirichlet_energy(u) == wdot(-lap_weighted(u), u)` exactly.
pub fn dirichlet_energy<T: Real>(u: &ScalarField<T>) -> T {
    let grid = u.grid();
    let m = grid.nodes_per_axis();
    let h = grid.spacing();
    let cell = grid.cell_volume();
    let vals = u.values();
    let mut total = T::zero();
    for d in 0..grid.dim() {
        let stride = grid.strides[d];
        for i in 0..grid.num_nodes() {
            let k = grid.axis_index(i, d);
            // edge to the right neighbour (ghost zero past the face)
            let right = if k < m - 1 { vals[i + stride] } else { T::zero() };
            let diff = (right - vals[i]) / h;
            total += diff * diff;
            if k == 0 {
                // ghost edge on the left face
                let diff = vals[i] / h;
                total += diff * diff;
            }
        }
    }
    total * cell
}

/// L2(w)-representative of the Dirichlet form's derivative: the 5-point
/// Laplacian scaled by `h^N / w_i` (a factor 2 per incident face). With
/// this scaling `wdot(-lap_weighted(u), v)` is exactly the mixed Dirichlet
/// form, which makes discrete functional gradients exact.
pub(crate) fn lap_weighted_into<T: Real>(grid: &Grid<T>, u: &[T], out: &mut [T]) {
    lap5_into(grid, u, out);
    let cell = grid.cell_volume();
    for (o, &w) in out.iter_mut().zip(grid.weights()) {
        *o *= cell / w;
    }
}
