//! Numerical workbench for weighted Sobolev embeddings.
//!
//! The crate provides, on truncated uniform grids:
//!
//! - weighted `H^1_V` / `L^tau_W` norms and embedding-inequality verifiers,
//! - a catalog of coercive potentials with numerical certifiers for the
//!   hypothesis classes the embedding statements need,
//! - explicit traveling-bump sequences witnessing non-embedding (`N >= 3`)
//!   and non-compactness (`N = 2`), with per-term certification,
//! - radial-coordinate reductions, Strauss-decay and tail-bound checks,
//! - a Nehari-manifold minimizer for the planar eigenproblem
//!   `-lap u + (V - lambda) u = V |u|^{p-1} u`, with concentration
//!   diagnostics along the minimizing trajectory.
//!
//! All kernels are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, which every shipped
//! experiment uses.

// Parameter validation uses negated comparisons (`!(x > 0)`) on purpose:
// they reject NaN, which `x <= 0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Stencil loops index several arrays by the same node id.
#![allow(clippy::needless_range_loop)]

pub mod battery;
pub mod bumps;
pub mod concentration;
pub mod conditions;
pub mod error;
pub mod grid;
pub mod nehari;
pub mod norms;
pub mod potential;
pub mod radial;
pub mod scalar;

pub use error::{Error, Result};

/// Default-precision aliases.
pub type Grid64 = grid::Grid<f64>;
pub type ScalarField64 = grid::ScalarField<f64>;
pub type VectorField64 = grid::VectorField<f64>;
pub type Potential64 = potential::Potential<f64>;
pub type RadialGrid64 = radial::RadialGrid<f64>;
pub type RadialField64 = radial::RadialField<f64>;
pub type BumpSequence64 = bumps::BumpSequence<f64>;
