//! Floating-point scalar abstraction.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar type the solver is generic over.
///
/// Implemented for `f32` and `f64`. All tolerances quoted in the docs assume
/// `f64`; `f32` is supported for exploratory runs only.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn from_i64_lossy(x: i64) -> Self {
        <Self as FromPrimitive>::from_i64(x).expect("i64 representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `2π`.
    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}
