//! Constrained minimization of
//! `I(u) = 1/2 int(|grad u|^2 + V u^2) - 1/(p+1) ||u||_2^2 int W |u|^{p+1}`
//! over the constraint set `J(u) = I'(u)[u] = 0` (nonzero `u`), and
//! extraction of the eigenpair `(u_bar, lambda)` solving
//! `-lap u + (V - lambda) u = W |u|^{p-1} u` on the truncated box.
//!
//! The energy `A(u)` is the Dirichlet form of the 5-point Laplacian (the
//! ghost-padded staggered sum), so the discrete gradient, the closed-form
//! constraint projection, and the eigenvalue identity are all exact at the
//! discrete level; `A` agrees with the norms module's `H^1_V` energy to
//! `O(h^2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    dirichlet_energy, lap_weighted_into, laplacian_ref4, wdot, ScalarField, SharedGrid,
};
use crate::potential::Potential;
use crate::scalar::Real;

/// Nehari-membership tolerance: `|J(u)| <= 1e-9 A(u)` after projection.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

/// Discretized functional pair `(I, J)` for a potential pair `(V, W)`;
/// `W = V` is the borderline self-interaction case.
pub struct NlsFunctional<T> {
    grid: SharedGrid<T>,
    v_vals: Vec<T>,
    w_vals: Vec<T>,
    p: T,
}

/// Cached homogeneous components: `A = ||u||_V^2` (Dirichlet form),
/// `B = ||u||_2^2`, `D = int W |u|^{p+1}`.
#[derive(Debug, Clone, Copy)]
pub struct Components<T> {
    pub a: T,
    pub b: T,
    pub d: T,
}

impl<T: Real> NlsFunctional<T> {
    pub fn new(
        grid: &SharedGrid<T>,
        v: &Potential<T>,
        w: &Potential<T>,
        p: T,
    ) -> Result<Self> {
        if !(p > T::one()) {
            return Err(Error::invalid("p", "nonlinearity exponent must exceed 1"));
        }
        let v_field = ScalarField::sample(grid, |x| v.eval(x))?;
        let w_field = ScalarField::sample(grid, |x| w.eval(x))?;
        Ok(NlsFunctional {
            grid: grid.clone(),
            v_vals: v_field.values().to_vec(),
            w_vals: w_field.values().to_vec(),
            p,
        })
    }

    pub fn grid(&self) -> &SharedGrid<T> {
        &self.grid
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn components(&self, u: &ScalarField<T>) -> Components<T> {
        let vals = u.values();
        let mut mass_v = T::zero();
        let mut mass = T::zero();
        let mut nonlinear = T::zero();
        let pp1 = self.p + T::one();
        for (i, &w) in self.grid.weights().iter().enumerate() {
            let x = vals[i];
            mass_v += w * self.v_vals[i] * x * x;
            mass += w * x * x;
            nonlinear += w * self.w_vals[i] * x.abs().powf(pp1);
        }
        Components {
            a: dirichlet_energy(u) + mass_v,
            b: mass,
            d: nonlinear,
        }
    }

    pub fn i_of(&self, c: &Components<T>) -> T {
        T::of(0.5) * c.a - c.b * c.d / (self.p + T::one())
    }

    pub fn j_of(&self, c: &Components<T>) -> T {
        c.a - (self.p + T::of(3.0)) / (self.p + T::one()) * c.b * c.d
    }

    pub fn i_value(&self, u: &ScalarField<T>) -> T {
        self.i_of(&self.components(u))
    }

    pub fn j_value(&self, u: &ScalarField<T>) -> T {
        self.j_of(&self.components(u))
    }

    /// L2(w)-representative of `I'(u)`:
    /// `-lap u + V u - (2 D / (p+1)) u - B W |u|^{p-1} u`, with the
    /// boundary-weighted Laplacian so that `<grad, phi>_w` reproduces the
    /// directional derivative exactly.
    pub fn gradient(&self, u: &ScalarField<T>) -> ScalarField<T> {
        let c = self.components(u);
        self.gradient_with(u, &c)
    }

    fn gradient_with(&self, u: &ScalarField<T>, c: &Components<T>) -> ScalarField<T> {
        let n = self.grid.num_nodes();
        let mut out = vec![T::zero(); n];
        lap_weighted_into(&self.grid, u.values(), &mut out);
        let pm1 = self.p - T::one();
        let lin = T::of(2.0) * c.d / (self.p + T::one());
        for i in 0..n {
            let x = u.values()[i];
            out[i] = -out[i] + self.v_vals[i] * x
                - lin * x
                - c.b * self.w_vals[i] * x.abs().powf(pm1) * x;
        }
        ScalarField::from_values_unchecked(&self.grid, out)
    }

    /// L2(w)-representative of `J'(u)` (used to project gradients onto the
    /// constraint tangent).
    fn constraint_gradient(&self, u: &ScalarField<T>, c: &Components<T>) -> ScalarField<T> {
        let n = self.grid.num_nodes();
        let mut out = vec![T::zero(); n];
        lap_weighted_into(&self.grid, u.values(), &mut out);
        let pm1 = self.p - T::one();
        let p3 = self.p + T::of(3.0);
        let lin = T::of(2.0) * p3 * c.d / (self.p + T::one());
        for i in 0..n {
            let x = u.values()[i];
            out[i] = T::of(2.0) * (-out[i] + self.v_vals[i] * x)
                - lin * x
                - p3 * c.b * self.w_vals[i] * x.abs().powf(pm1) * x;
        }
        ScalarField::from_values_unchecked(&self.grid, out)
    }

    /// Closed-form constraint projection: the unique `t > 0` with
    /// `J(t u) = 0` is `t = ((p+1) A / ((p+3) B D))^{1/(p+1)}`.
    pub fn project(&self, u: &ScalarField<T>) -> Result<ScalarField<T>> {
        let c = self.components(u);
        let t = self.projection_scale(&c)?;
        Ok(u.scaled(t))
    }

    pub fn projection_scale(&self, c: &Components<T>) -> Result<T> {
        if !(c.a > T::zero() && c.b > T::zero() && c.d > T::zero()) {
            return Err(Error::ProjectionUndefined(
                "projection needs a nonzero field".to_string(),
            ));
        }
        let p3 = self.p + T::of(3.0);
        let pp1 = self.p + T::one();
        Ok((pp1 * c.a / (p3 * c.b * c.d)).powf(T::one() / pp1))
    }

    /// Preconditioner solve `(-lap + V) d = rhs` by conjugate gradients in
    /// the quadrature inner product (the operator is self-adjoint there).
    pub fn precondition(&self, rhs: &ScalarField<T>, tol: T, max_iter: usize) -> ScalarField<T> {
        let n = self.grid.num_nodes();
        let apply = |x: &[T], out: &mut Vec<T>| {
            lap_weighted_into(&self.grid, x, out);
            for i in 0..n {
                out[i] = -out[i] + self.v_vals[i] * x[i];
            }
        };
        let mut d = vec![T::zero(); n];
        let mut r = rhs.values().to_vec();
        let mut q = r.clone();
        let mut aq = vec![T::zero(); n];
        let mut rs = wdot(&self.grid, &r, &r);
        let rs0 = rs;
        if !(rs0 > T::zero()) {
            return ScalarField::from_values_unchecked(&self.grid, d);
        }
        for _ in 0..max_iter {
            apply(&q, &mut aq);
            let qaq = wdot(&self.grid, &q, &aq);
            if !(qaq > T::zero()) {
                break;
            }
            let alpha = rs / qaq;
            for i in 0..n {
                d[i] += alpha * q[i];
                r[i] -= alpha * aq[i];
            }
            let rs_new = wdot(&self.grid, &r, &r);
            if (rs_new / rs0).sqrt() < tol {
                break;
            }
            let beta = rs_new / rs;
            for i in 0..n {
                q[i] = r[i] + beta * q[i];
            }
            rs = rs_new;
        }
        ScalarField::from_values_unchecked(&self.grid, d)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOpts<T> {
    pub max_iter: usize,
    /// Stop when the constraint-tangent gradient norm drops below
    /// `tol * ||u||_V`.
    pub tol: T,
    pub cg_tol: T,
    pub cg_max_iter: usize,
    /// Replace `u` by `|u|` (and re-project) every this many iterations.
    pub abs_every: usize,
    /// Keep a field snapshot every this many iterations for diagnostics.
    pub snapshot_every: usize,
    pub max_backtracks: usize,
}

impl<T: Real> Default for SolveOpts<T> {
    fn default() -> Self {
        SolveOpts {
            max_iter: 5000,
            tol: T::of(1e-6),
            cg_tol: T::of(1e-8),
            cg_max_iter: 5000,
            abs_every: 10,
            snapshot_every: 25,
            max_backtracks: 40,
        }
    }
}

/// Optimizer iterate bookkeeping; `field` is populated on snapshots.
#[derive(Debug, Clone)]
pub struct NehariState<T> {
    pub iter: usize,
    pub energy_sq: T,
    pub mass_sq: T,
    pub nonlinear: T,
    pub i_value: T,
    pub j_value: T,
    pub grad_norm: T,
    pub field: Option<ScalarField<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    StepRejected,
    Collapsed,
}

/// Final minimizer with the extracted eigenpair and its diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionPair<T> {
    pub u0: ScalarField<T>,
    pub u_bar: ScalarField<T>,
    pub mu: T,
    pub lambda: T,
    pub i_value: T,
    pub j_over_a: T,
    /// `||-lap u_bar + (V - lambda) u_bar - W |u_bar|^{p-1} u_bar||_2 /
    /// ||u_bar||_V`, measured with the fourth-order reference Laplacian so
    /// discretization error is visible in refinement studies.
    pub residual: T,
    pub negativity: T,
    pub lambda_identity_slack: T,
    /// Fraction of `||u_bar||_2^2` outside the ball of half the box radius.
    pub outer_mass_fraction: T,
}

pub struct SolveOutcome<T> {
    pub trajectory: Vec<NehariState<T>>,
    pub solution: SolutionPair<T>,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
}

impl<T: Real> NlsFunctional<T> {
    /// Projected, preconditioned descent: at each step solve
    /// `(-lap + V) d = grad I(u)`, backtrack `u <- project(u - s d)` until
    /// `I` decreases, and stop when the constraint-tangent gradient norm
    /// falls below `tol * ||u||_V`. `I` is nonincreasing along accepted
    /// steps (the periodic `|u|` replacement can only lower it).
    pub fn minimize(
        &self,
        initial: &ScalarField<T>,
        opts: &SolveOpts<T>,
    ) -> Result<SolveOutcome<T>> {
        let mut u = self.project(initial)?;
        let mut trajectory: Vec<NehariState<T>> = Vec::new();
        let mut termination = Termination::MaxIterations;
        let mut iterations = 0;
        let mut c = self.components(&u);
        let mut i_curr = self.i_of(&c);
        for iter in 0..opts.max_iter {
            iterations = iter;
            if c.a.sqrt() < T::of(1e-12) {
                termination = Termination::Collapsed;
                break;
            }
            let g = self.gradient_with(&u, &c);
            let n_rep = self.constraint_gradient(&u, &c);
            let gn = wdot(&self.grid, g.values(), n_rep.values());
            let nn = wdot(&self.grid, n_rep.values(), n_rep.values());
            let tangent = if nn > T::zero() {
                g.add_scaled(-gn / nn, &n_rep)?
            } else {
                g.clone()
            };
            let grad_norm = wdot(&self.grid, tangent.values(), tangent.values()).sqrt();
            let snapshot = iter % opts.snapshot_every == 0;
            trajectory.push(NehariState {
                iter,
                energy_sq: c.a,
                mass_sq: c.b,
                nonlinear: c.d,
                i_value: i_curr,
                j_value: self.j_of(&c),
                grad_norm,
                field: snapshot.then(|| u.clone()),
            });
            if grad_norm < opts.tol * c.a.sqrt() {
                termination = Termination::GradientTolerance;
                break;
            }
            let d = self.precondition(&g, opts.cg_tol, opts.cg_max_iter);
            let mut step = T::one();
            let mut accepted = None;
            for _ in 0..opts.max_backtracks {
                let trial = u.add_scaled(-step, &d)?;
                let tc = self.components(&trial);
                if tc.a > T::zero() && tc.b > T::zero() && tc.d > T::zero() {
                    if let Ok(t) = self.projection_scale(&tc) {
                        let proj = trial.scaled(t);
                        let pc = self.components(&proj);
                        let i_new = self.i_of(&pc);
                        if i_new < i_curr {
                            accepted = Some((proj, pc, i_new));
                            break;
                        }
                    }
                }
                step *= T::of(0.5);
            }
            match accepted {
                Some((proj, pc, i_new)) => {
                    u = proj;
                    c = pc;
                    i_curr = i_new;
                }
                None => {
                    termination = Termination::StepRejected;
                    break;
                }
            }
            if (iter + 1) % opts.abs_every == 0 {
                let candidate = self.project(&u.abs())?;
                let cc = self.components(&candidate);
                let ic = self.i_of(&cc);
                if ic <= i_curr {
                    u = candidate;
                    c = cc;
                    i_curr = ic;
                }
            }
        }
        // final state with a guaranteed snapshot
        let g = self.gradient_with(&u, &c);
        let n_rep = self.constraint_gradient(&u, &c);
        let gn = wdot(&self.grid, g.values(), n_rep.values());
        let nn = wdot(&self.grid, n_rep.values(), n_rep.values());
        let tangent = if nn > T::zero() {
            g.add_scaled(-gn / nn, &n_rep)?
        } else {
            g
        };
        let grad_norm = wdot(&self.grid, tangent.values(), tangent.values()).sqrt();
        trajectory.push(NehariState {
            iter: iterations + 1,
            energy_sq: c.a,
            mass_sq: c.b,
            nonlinear: c.d,
            i_value: i_curr,
            j_value: self.j_of(&c),
            grad_norm,
            field: Some(u.clone()),
        });
        let solution = self.extract(&u)?;
        Ok(SolveOutcome {
            trajectory,
            solution,
            iterations: iterations + 1,
            converged: termination == Termination::GradientTolerance,
            termination,
        })
    }

    /// Eigenpair extraction from a constrained minimizer:
    /// `lambda = (2/(p+1)) int W u0^{p+1}`, `mu = ||u0||_2^2`,
    /// `u_bar = mu^{1/(p-1)} u0`.
    pub fn extract(&self, u0: &ScalarField<T>) -> Result<SolutionPair<T>> {
        let c = self.components(u0);
        if !(c.a > T::zero()) {
            return Err(Error::ProjectionUndefined(
                "cannot extract from the zero field".to_string(),
            ));
        }
        let j = self.j_of(&c);
        if j.abs() > T::of(1e-6) * c.a {
            return Err(Error::invalid(
                "u0",
                format!(
                    "not on the constraint set: |J|/A = {}",
                    (j / c.a).as_f64()
                ),
            ));
        }
        let pp1 = self.p + T::one();
        let lambda = T::of(2.0) * c.d / pp1;
        let mu = c.b;
        let u_bar = u0.scaled(mu.powf(T::one() / (self.p - T::one())));
        let cb = self.components(&u_bar);
        // lambda identity: (2/(p+3)) A(u_bar)/B(u_bar), exact when J = 0
        let lam_id = T::of(2.0) / (self.p + T::of(3.0)) * cb.a / cb.b;
        let lambda_identity_slack = (lambda - lam_id).abs() / lambda;
        // PDE residual with the reference Laplacian
        let lap = laplacian_ref4(&u_bar);
        let n = self.grid.num_nodes();
        let mut res = vec![T::zero(); n];
        let pm1 = self.p - T::one();
        for i in 0..n {
            let x = u_bar.values()[i];
            res[i] = -lap.values()[i] + (self.v_vals[i] - lambda) * x
                - self.w_vals[i] * x.abs().powf(pm1) * x;
        }
        let res_l2 = wdot(&self.grid, &res, &res).sqrt();
        let residual = res_l2 / cb.a.sqrt();
        // diagnostics: negative-part mass and mass fraction outside B_{R/2}
        let mut negativity = T::zero();
        let mut outer = T::zero();
        let half = self.grid.radius() * T::of(0.5);
        for (i, &w) in self.grid.weights().iter().enumerate() {
            let x = u_bar.values()[i];
            let neg = x.min(T::zero());
            negativity += w * neg * neg;
            if self.grid.node_radius(i) > half {
                outer += w * x * x;
            }
        }
        Ok(SolutionPair {
            u0: u0.clone(),
            u_bar,
            mu,
            lambda,
            i_value: self.i_of(&c),
            j_over_a: j / c.a,
            residual,
            negativity,
            lambda_identity_slack,
            outer_mass_fraction: outer / cb.b,
        })
    }
}

/// `I(u)` for the self-interaction case `W = V`.
pub fn functional_i<T: Real>(u: &ScalarField<T>, v: &Potential<T>, p: T) -> Result<T> {
    Ok(NlsFunctional::new(u.grid(), v, v, p)?.i_value(u))
}

/// `J(u) = I'(u)[u]` for `W = V`.
pub fn functional_j<T: Real>(u: &ScalarField<T>, v: &Potential<T>, p: T) -> Result<T> {
    Ok(NlsFunctional::new(u.grid(), v, v, p)?.j_value(u))
}

/// L2(w)-representative of `I'(u)` for `W = V`.
pub fn gradient_i<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    p: T,
) -> Result<ScalarField<T>> {
    Ok(NlsFunctional::new(u.grid(), v, v, p)?.gradient(u))
}

/// Scale `u` onto the constraint set (`W = V`).
pub fn nehari_project<T: Real>(
    u: &ScalarField<T>,
    v: &Potential<T>,
    p: T,
) -> Result<ScalarField<T>> {
    NlsFunctional::new(u.grid(), v, v, p)?.project(u)
}

/// Minimize `I` over the constraint set starting from `initial` (`W = V`).
pub fn minimize<T: Real>(
    initial: &ScalarField<T>,
    v: &Potential<T>,
    p: T,
    opts: &SolveOpts<T>,
) -> Result<SolveOutcome<T>> {
    NlsFunctional::new(initial.grid(), v, v, p)?.minimize(initial, opts)
}

/// Extract the eigenpair from a constrained minimizer (`W = V`).
pub fn extract_solution<T: Real>(
    u0: &ScalarField<T>,
    v: &Potential<T>,
    p: T,
) -> Result<SolutionPair<T>> {
    NlsFunctional::new(u0.grid(), v, v, p)?.extract(u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::potential::{make_constant, make_power};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gaussian(r: f64, m: usize) -> ScalarField<f64> {
        let g = Grid::<f64>::new(2, r, m).unwrap().shared();
        ScalarField::sample(&g, |x| (-crate::scalar::norm_sq(x) / 2.0).exp()).unwrap()
    }

    #[test]
    fn functionals_on_gaussian_match_closed_forms() {
        // A = 2 pi, B = pi, D = pi/2 for V = 1, p = 3
        let u = gaussian(8.0, 257);
        let one = make_constant(1.0).unwrap();
        let i = functional_i(&u, &one, 3.0).unwrap();
        // discrete Dirichlet energy carries a -pi h^2/8 bias: ~8e-4 here
        assert_relative_eq!(i, PI - PI * PI / 8.0, max_relative = 1e-3);
        let j = functional_j(&u, &one, 3.0).unwrap();
        assert_relative_eq!(j, 2.0 * PI - 3.0 * PI * PI / 4.0, max_relative = 3e-3);
        let z = ScalarField::zeros(u.grid());
        assert_eq!(functional_i(&z, &one, 3.0).unwrap(), 0.0);
        assert_eq!(functional_j(&z, &one, 3.0).unwrap(), 0.0);
        assert!(gradient_i(&z, &one, 3.0)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn homogeneity_of_i() {
        let u = gaussian(6.0, 65);
        let v = make_power(2.0).unwrap();
        let f = NlsFunctional::new(u.grid(), &v, &v, 3.0).unwrap();
        let c = f.components(&u);
        for t in [0.5, 2.0] {
            let direct = f.i_value(&u.scaled(t));
            let predicted = t * t / 2.0 * c.a - t.powi(6) / 4.0 * c.b * c.d;
            assert_relative_eq!(direct, predicted, max_relative = 1e-10);
        }
    }

    #[test]
    fn gradient_pairs_to_j_exactly() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 5.0, 33).unwrap().shared();
        for (k, u) in crate::battery::bump_fields(&g, 5, 8).iter().enumerate() {
            let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
            let grad = f.gradient(u);
            let pairing = wdot(&g, grad.values(), u.values());
            let j = f.j_value(u);
            assert_relative_eq!(pairing, j, max_relative = 1e-10, epsilon = 1e-12);
            let _ = k;
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 5.0, 33).unwrap().shared();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        let fields = crate::battery::bump_fields(&g, 40, 99);
        for pair in fields.chunks(2) {
            let (u, phi) = (&pair[0], &pair[1]);
            let eps = 1e-5;
            let ip = f.i_value(&u.add_scaled(eps, phi).unwrap());
            let im = f.i_value(&u.add_scaled(-eps, phi).unwrap());
            let fd = (ip - im) / (2.0 * eps);
            let pairing = wdot(&g, f.gradient(u).values(), phi.values());
            assert_relative_eq!(fd, pairing, max_relative = 1e-5);
        }
    }

    #[test]
    fn projection_closed_form_and_fixed_point() {
        let v = make_constant(1.0).unwrap();
        let u = gaussian(8.0, 129);
        let f = NlsFunctional::new(u.grid(), &v, &v, 3.0).unwrap();
        // Gaussian constants: t = (8 / (3 pi))^{1/4}
        let c = f.components(&u);
        let t = f.projection_scale(&c).unwrap();
        assert_relative_eq!(t, (8.0 / (3.0 * PI)).powf(0.25), max_relative = 1e-3);
        let proj = f.project(&u).unwrap();
        let pc = f.components(&proj);
        assert!(f.j_of(&pc).abs() <= CONSTRAINT_TOLERANCE * pc.a);
        // already projected: t = 1
        let t2 = f.projection_scale(&pc).unwrap();
        assert_relative_eq!(t2, 1.0, epsilon = 1e-10);
        // projection absorbs scalar multiples; the extracted eigenvalue is
        // therefore identical
        let rescaled = f.project(&proj.scaled(-7.5)).unwrap();
        let pc2 = f.components(&rescaled);
        assert_relative_eq!(pc2.a, pc.a, max_relative = 1e-10);
        let lam1 = f.extract(&proj).unwrap().lambda;
        let lam2 = f.extract(&rescaled).unwrap().lambda;
        assert_relative_eq!(lam1, lam2, max_relative = 1e-10);

        let z = ScalarField::zeros(u.grid());
        assert!(matches!(
            f.project(&z),
            Err(Error::ProjectionUndefined(_))
        ));
    }

    #[test]
    fn projection_algebraic_example() {
        // p = 3, A = 2, B = 1, D = 1: t = (4/3)^{1/4}
        let t = (4.0_f64 * 2.0 / (6.0 * 1.0 * 1.0)).powf(0.25);
        assert_relative_eq!(t, (4.0_f64 / 3.0).powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(t, 1.0745699318235422, max_relative = 1e-12);
    }

    #[test]
    fn nehari_identity_on_projected_fields() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 6.0, 65).unwrap().shared();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        for u in crate::battery::bump_fields(&g, 10, 4) {
            let proj = f.project(&u).unwrap();
            let c = f.components(&proj);
            let i = f.i_of(&c);
            let p = 3.0;
            let via_a = (p + 1.0) / (2.0 * (p + 3.0)) * c.a;
            let via_bd = 0.5 * c.b * c.d;
            assert_relative_eq!(i, via_a, max_relative = 1e-9);
            assert_relative_eq!(i, via_bd, max_relative = 1e-9);
        }
    }

    #[test]
    fn sign_invariance_of_i() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 5.0, 33).unwrap().shared();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        for u in crate::battery::bump_fields(&g, 5, 21) {
            // evenness is exact
            assert_eq!(f.i_value(&u.scaled(-1.0)), f.i_value(&u));
            // |u| of a nonnegative field is exact; for mixed signs the
            // discrete energy can only drop
            assert!(f.i_value(&u.abs()) <= f.i_value(&u) + 1e-12);
        }
    }

    #[test]
    fn minimize_small_grid_converges() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 8.0, 65).unwrap().shared();
        let init =
            ScalarField::sample(&g, |x| (-crate::scalar::norm_sq(x) / 2.0).exp()).unwrap();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        let outcome = f.minimize(&init, &SolveOpts::default()).unwrap();
        assert!(outcome.converged, "termination {:?}", outcome.termination);
        let sol = &outcome.solution;
        assert!(sol.lambda > 0.0);
        assert!(sol.mu > 0.0);
        assert!(sol.j_over_a.abs() < 1e-6);
        assert!(sol.lambda_identity_slack < 1e-8);
        assert!(sol.negativity < 1e-16);
        assert!(sol.i_value > 1e-6);
        // descent along the trajectory
        for w in outcome.trajectory.windows(2) {
            assert!(w[1].i_value <= w[0].i_value + 1e-12);
        }
        // constraint satisfied along the way
        for s in &outcome.trajectory {
            assert!(s.j_value.abs() <= 1e-9 * s.energy_sq);
        }
    }

    #[test]
    fn minimize_rejects_zero_initial() {
        let v = make_power(2.0).unwrap();
        let g = Grid::<f64>::new(2, 6.0, 33).unwrap().shared();
        let z = ScalarField::zeros(&g);
        assert!(matches!(
            minimize(&z, &v, 3.0, &SolveOpts::default()),
            Err(Error::ProjectionUndefined(_))
        ));
    }

    #[test]
    fn extract_requires_constraint_membership() {
        let v = make_power(2.0).unwrap();
        let u = gaussian(6.0, 33);
        // an unprojected Gaussian is far from the constraint set
        assert!(extract_solution(&u, &v, 3.0).is_err());
        let proj = nehari_project(&u, &v, 3.0).unwrap();
        let sol = extract_solution(&proj, &v, 3.0).unwrap();
        assert!(sol.lambda > 0.0);
        assert!(sol.lambda_identity_slack < 1e-8);
    }
}
