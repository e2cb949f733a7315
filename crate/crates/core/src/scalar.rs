//! Scalar abstraction shared by every numerical kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the simulator is generic over (`f32` and `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + rustfft::FftNum + Sum + Default + Display + Debug
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_i64_(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("i64 representable")
    }

    #[inline]
    fn to_f64_(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand used throughout the crate.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
