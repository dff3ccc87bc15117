//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar the decomposition is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that depend on the working
/// precision are exposed as associated functions so the same algorithm can
/// pick thresholds appropriate to the type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + FftNum + Default + Debug + Display
{
    /// Largest imaginary residue, relative to the signal norm, that an
    /// inverse transform may silently discard.
    fn residue_tolerance() -> Self;

    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f32 {
    fn residue_tolerance() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn residue_tolerance() -> Self {
        1e-12
    }
}

/// Euclidean norm of a real slice.
pub fn l2_norm<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}
