//! Seeded, reproducible test-field batteries.
//!
//! Fields are sums of 1-5 Gaussian bumps with centers uniform in the box
//! and widths log-uniform in `[4h, R/4]`. Parameters are always drawn in
//! `f64` and converted, so a seed produces the same battery for every
//! scalar type.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{ScalarField, SharedGrid};
use crate::radial::{RadialField, SharedRadialGrid};
use crate::scalar::Real;

struct Bump {
    center: Vec<f64>,
    width: f64,
    amplitude: f64,
}

fn draw_bumps(rng: &mut ChaCha8Rng, dim: usize, radius: f64, spacing: f64) -> Vec<Bump> {
    let count = rng.gen_range(1..=5usize);
    let w_lo = (4.0 * spacing).min(radius / 4.0);
    let w_hi = radius / 4.0;
    (0..count)
        .map(|_| {
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
            let width = if w_hi > w_lo {
                (rng.gen_range(w_lo.ln()..w_hi.ln())).exp()
            } else {
                w_hi
            };
            let amplitude = rng.gen_range(0.3..1.0);
            Bump {
                center,
                width,
                amplitude,
            }
        })
        .collect()
}

fn eval_bumps<T: Real>(bumps: &[Bump], x: &[T]) -> T {
    let mut acc = T::zero();
    for b in bumps {
        let mut d2 = T::zero();
        for (xd, &cd) in x.iter().zip(&b.center) {
            let d = *xd - T::of(cd);
            d2 += d * d;
        }
        let w = T::of(b.width);
        acc += T::of(b.amplitude) * (-d2 / (T::of(2.0) * w * w)).exp();
    }
    acc
}

/// Random bump fields on a tensor grid.
pub fn bump_fields<T: Real>(
    grid: &SharedGrid<T>,
    count: usize,
    seed: u64,
) -> Vec<ScalarField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let radius = grid.radius().as_f64();
    let spacing = grid.spacing().as_f64();
    (0..count)
        .map(|_| {
            let bumps = draw_bumps(&mut rng, dim, radius, spacing);
            ScalarField::sample(grid, |x| eval_bumps(&bumps, x))
                .expect("gaussian bumps are finite")
        })
        .collect()
}

/// Random radial bump fields: sums of Gaussians in the radial variable with
/// centers in `[0, 0.7 R]` and widths log-uniform in `[4h, R/6]`.
pub fn radial_bump_fields<T: Real>(
    grid: &SharedRadialGrid<T>,
    count: usize,
    seed: u64,
) -> Vec<RadialField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = grid.radius().as_f64();
    let spacing = grid.spacing().as_f64();
    let w_lo = (4.0 * spacing).min(radius / 6.0);
    let w_hi = radius / 6.0;
    (0..count)
        .map(|_| {
            let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=5usize))
                .map(|_| {
                    let c = rng.gen_range(0.0..0.7 * radius);
                    let w = if w_hi > w_lo {
                        (rng.gen_range(w_lo.ln()..w_hi.ln())).exp()
                    } else {
                        w_hi
                    };
                    let a = rng.gen_range(0.3..1.0);
                    (c, w, a)
                })
                .collect();
            RadialField::sample(grid, |r| {
                let mut acc = T::zero();
                for &(c, w, a) in &bumps {
                    let d = r - T::of(c);
                    let wt = T::of(w);
                    acc += T::of(a) * (-d * d / (T::of(2.0) * wt * wt)).exp();
                }
                acc
            })
            .expect("gaussian bumps are finite")
        })
        .collect()
}
