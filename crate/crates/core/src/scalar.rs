//! Scalar abstraction: every kernel is generic over `Real`, implemented
//! for `f32` and `f64`. Concrete aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used by grids, norms, and solvers.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }

    /// Lossless(ish) view as `f64` for reports and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Squared Euclidean length of a coordinate slice.
pub fn norm_sq<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &c| acc + c * c)
}

/// Euclidean length of a coordinate slice.
pub fn norm<T: Real>(x: &[T]) -> T {
    norm_sq(x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        assert_eq!(<f64 as Real>::of(0.25), 0.25);
        assert_eq!(<f32 as Real>::of(0.25), 0.25_f32);
        assert_eq!(0.25_f64.as_f64(), 0.25);
    }

    #[test]
    fn euclidean_norm() {
        assert_eq!(norm(&[3.0_f64, 4.0]), 5.0);
        assert_eq!(norm_sq(&[1.0_f32, 2.0, 2.0]), 9.0);
    }
}
