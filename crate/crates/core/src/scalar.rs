//! Scalar abstraction for probability arithmetic.
//!
//! Every table, factor and estimator in this crate is generic over [`Prob`],
//! which is implemented for `f32` and `f64`. The crate root exports `f64`
//! aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A floating-point type usable as a probability.
pub trait Prob:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for internal arithmetic identities (sums to one, two-route checks).
    fn arith_tol() -> Self;

    /// Tolerance for human-typed inputs such as CPT row sums.
    fn input_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Prob for f64 {
    #[inline]
    fn arith_tol() -> Self {
        1e-12
    }
    #[inline]
    fn input_tol() -> Self {
        1e-9
    }
}

impl Prob for f32 {
    #[inline]
    fn arith_tol() -> Self {
        1e-5
    }
    #[inline]
    fn input_tol() -> Self {
        1e-5
    }
}

/// Largest absolute elementwise difference between two equally sized slices.
pub fn max_abs_diff<T: Prob>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}
