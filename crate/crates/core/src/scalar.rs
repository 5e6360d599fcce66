//! Scalar abstraction shared by every bench.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the simulation is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Absolute slack used when checking normalization of inputs.
    fn norm_tolerance() -> Self;
}

impl Real for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn norm_tolerance() -> Self {
        1e-9
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in scalar type")
}

/// Maps an angle into `[0, 2π)`.
pub fn canonical_angle<T: Real>(angle: T) -> T {
    let two_pi = T::TAU();
    let r = angle % two_pi;
    let r = if r < T::zero() { r + two_pi } else { r };
    // `r + 2π` can round up to exactly 2π for tiny negative inputs.
    if r >= two_pi {
        T::zero()
    } else {
        r
    }
}
