//! Catalog of positive weight functions and the vanishing envelopes used
//! by the radial tail bound.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

type EvalFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type GradFn<T> = Arc<dyn Fn(&[T]) -> [T; 3] + Send + Sync>;

/// Positive weight function `V` with optional analytic gradient.
///
/// `lower_bound` is the claimed positive infimum (the class requirement
/// "continuous and bounded below by a positive constant").
#[derive(Clone)]
pub struct Potential<T> {
    name: String,
    eval: EvalFn<T>,
    grad: Option<GradFn<T>>,
    radial: bool,
    coercive: bool,
    lower_bound: T,
}

impl<T: Real> Potential<T> {
    pub fn new(
        name: impl Into<String>,
        lower_bound: T,
        eval: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        Potential {
            name: name.into(),
            eval: Arc::new(eval),
            grad: None,
            radial: false,
            coercive: false,
            lower_bound,
        }
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[T]) -> [T; 3] + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn radial(mut self, flag: bool) -> Self {
        self.radial = flag;
        self
    }

    pub fn coercive(mut self, flag: bool) -> Self {
        self.coercive = flag;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn is_coercive(&self) -> bool {
        self.coercive
    }

    pub fn lower_bound(&self) -> T {
        self.lower_bound
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        (self.eval)(x)
    }

    /// Analytic gradient when available, otherwise central finite
    /// differences with step `1e-6 * (1 + |x|)` per component.
    pub fn grad(&self, x: &[T]) -> [T; 3] {
        match &self.grad {
            Some(g) => g(x),
            None => self.fd_grad(x),
        }
    }

    fn fd_grad(&self, x: &[T]) -> [T; 3] {
        let h = T::of(1e-6) * (T::one() + norm(x));
        let mut out = [T::zero(); 3];
        let mut xp = [T::zero(); 3];
        let mut xm = [T::zero(); 3];
        xp[..x.len()].copy_from_slice(x);
        xm[..x.len()].copy_from_slice(x);
        for d in 0..x.len() {
            xp[d] = x[d] + h;
            xm[d] = x[d] - h;
            out[d] = ((self.eval)(&xp[..x.len()]) - (self.eval)(&xm[..x.len()]))
                / (T::of(2.0) * h);
            xp[d] = x[d];
            xm[d] = x[d];
        }
        out
    }

    /// Spot-check of the radial flag: `V` must agree on random rotations of
    /// random sample points. The tolerance is loose (1e-6 relative) because
    /// rotated coordinates only reproduce the radius to the last ulp, which
    /// steep potentials amplify.
    pub fn spot_check_radial(&self, dim: usize, seed: u64, samples: usize) -> bool {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let r = rng.gen_range(0.0..8.0_f64);
            let x = random_direction(&mut rng, dim, r);
            let y = random_direction(&mut rng, dim, r);
            let vx = self.eval(&x.iter().map(|&c| T::of(c)).collect::<Vec<_>>());
            let vy = self.eval(&y.iter().map(|&c| T::of(c)).collect::<Vec<_>>());
            let scale = vx.abs().max(vy.abs()).max(T::one());
            if (vx - vy).abs() > T::of(1e-6) * scale {
                return false;
            }
        }
        true
    }
}

fn random_direction(rng: &mut impl rand::Rng, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|c| c / n * r).collect();
        }
    }
}

fn require_positive<T: Real>(name: &'static str, alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {alpha}")))
    }
}

/// `V(x) = 1 + |x|^alpha`.
pub fn make_power<T: Real>(alpha: T) -> Result<Potential<T>> {
    require_positive("alpha", alpha)?;
    let a64 = alpha.as_f64();
    let eval = move |x: &[T]| T::one() + norm(x).powf(alpha);
    let grad = move |x: &[T]| {
        let r = norm(x);
        let mut out = [T::zero(); 3];
        if r > T::zero() {
            // grad = alpha r^{alpha-2} x
            let factor = alpha * r.powf(alpha - T::of(2.0));
            for (o, &c) in out.iter_mut().zip(x) {
                *o = factor * c;
            }
        }
        out
    };
    Ok(Potential::new(format!("power(alpha={a64})"), T::one(), eval)
        .with_gradient(grad)
        .radial(true)
        .coercive(true))
}

/// `V(x) = exp(|x|^alpha)`.
pub fn make_exponential<T: Real>(alpha: T) -> Result<Potential<T>> {
    require_positive("alpha", alpha)?;
    let a64 = alpha.as_f64();
    let eval = move |x: &[T]| norm(x).powf(alpha).exp();
    let grad = move |x: &[T]| {
        let r = norm(x);
        let mut out = [T::zero(); 3];
        if r > T::zero() {
            let factor = alpha * r.powf(alpha - T::of(2.0)) * r.powf(alpha).exp();
            for (o, &c) in out.iter_mut().zip(x) {
                *o = factor * c;
            }
        }
        out
    };
    Ok(
        Potential::new(format!("exponential(alpha={a64})"), T::one(), eval)
            .with_gradient(grad)
            .radial(true)
            .coercive(true),
    )
}

/// `V(x) = |x|^2 (sin(e^{|x|}) + 2) + 1`: coercive but with a gradient
/// that outgrows `V^{3/2}` along radii where the oscillation is steep.
pub fn make_oscillating<T: Real>() -> Potential<T> {
    let eval = |x: &[T]| {
        let r = norm(x);
        r * r * (r.exp().sin() + T::of(2.0)) + T::one()
    };
    let grad = |x: &[T]| {
        let r = norm(x);
        let mut out = [T::zero(); 3];
        if r > T::zero() {
            let er = r.exp();
            let dvdr = T::of(2.0) * r * (er.sin() + T::of(2.0)) + r * r * er.cos() * er;
            for (o, &c) in out.iter_mut().zip(x) {
                *o = dvdr * c / r;
            }
        }
        out
    };
    Potential::new("oscillating", T::one(), eval)
        .with_gradient(grad)
        .radial(true)
        .coercive(true)
}

/// Step potential equal to `n^2` on the annulus `n - 1/n <= |x| <= n + 1/n`,
/// extended by linear interpolation in `|x|` across the gaps. The first two
/// annuli overlap as written; the larger index wins there, so every bump
/// support `B_{1/n}(n, 0)` with `n >= 2` sees the constant value `n^2`.
pub fn make_annular_step<T: Real>() -> Potential<T> {
    let eval = |x: &[T]| {
        let r = norm(x).as_f64();
        // largest n with n - 1/n <= r
        let n = (((r + (r * r + 4.0).sqrt()) / 2.0).floor() as u64).max(1);
        let nf = n as f64;
        let outer = nf + 1.0 / nf;
        let v = if r <= outer {
            nf * nf
        } else {
            let next = nf + 1.0;
            let inner_next = next - 1.0 / next;
            let t = (r - outer) / (inner_next - outer);
            nf * nf + t * (next * next - nf * nf)
        };
        T::of(v)
    };
    Potential::new("annular_step", T::one(), eval)
        .radial(true)
        .coercive(true)
}

/// `V(x) = c` with `c > 0` (not coercive; handy as the weight `W = 1`).
pub fn make_constant<T: Real>(c: T) -> Result<Potential<T>> {
    require_positive("value", c)?;
    let c64 = c.as_f64();
    Ok(
        Potential::new(format!("constant({c64})"), c, move |_: &[T]| c)
            .with_gradient(|_| [T::zero(); 3])
            .radial(true),
    )
}

/// Positive radial envelope vanishing at infinity (the `phi` of the radial
/// embedding condition). Evaluated on the radius only.
#[derive(Clone)]
pub struct DecayFn<T> {
    name: String,
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
}

impl<T: Real> DecayFn<T> {
    pub fn new(name: impl Into<String>, eval: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        DecayFn {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// `phi(r) = (1 + r)^{-beta}` with `beta > 0`.
    pub fn inverse_power(beta: T) -> Result<Self> {
        require_positive("beta", beta)?;
        let b64 = beta.as_f64();
        Ok(DecayFn::new(format!("(1+r)^-{b64}"), move |r: T| {
            (T::one() + r).powf(-beta)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: T) -> T {
        (self.eval)(r)
    }

    /// Sampled vanishing check: strictly decreasing on a geometric ladder of
    /// radii past `r0` and small at the far end.
    pub fn check_vanishing(&self, r0: T) -> Result<()> {
        let base = r0.max(T::one());
        let mut prev = self.eval(base);
        let first = prev;
        if !(prev > T::zero()) {
            return Err(Error::NotVanishing(self.name.clone()));
        }
        for k in 1..=6 {
            let r = base * T::of(f64::powi(2.0, k));
            let v = self.eval(r);
            if !(v > T::zero()) || v >= prev {
                return Err(Error::NotVanishing(self.name.clone()));
            }
            prev = v;
        }
        if prev > first * T::of(0.5) {
            return Err(Error::NotVanishing(self.name.clone()));
        }
        Ok(())
    }
}
