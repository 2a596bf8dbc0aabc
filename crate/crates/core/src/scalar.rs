//! Scalar abstractions.
//!
//! Two tiers are used throughout the crate:
//!
//! * [`Scalar`] only needs exact field arithmetic and ordering. The erasure
//!   channel recursion, the capacity-profile statistics and the word error
//!   product formula are written against it, so they run unchanged on `f32`,
//!   `f64` and on exact rationals such as [`crate::Rational`].
//! * [`Real`] adds transcendental functions. Everything touching Gaussian
//!   noise, log-likelihood ratios or quadrature requires it.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar with a total enough order for probabilities.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + Debug {
    /// Converts a small count, panicking only if `Self` cannot represent it.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + FromPrimitive + Debug {}

/// Floating-point scalar (`f32` or `f64`).
pub trait Real: Scalar + Float + FloatConst + ToPrimitive + Display + Default + Sum + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
