//! Scalar abstraction used by every module in this crate.
//!
//! All physics code is generic over a real floating-point type implementing
//! [`Real`], so the same formulas run at `f32` or `f64` precision. Concrete
//! `f64` type aliases are exported from the crate root.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// A real floating-point scalar usable throughout the library.
///
/// This is a blanket-implemented umbrella over the `num-traits` float traits
/// plus the marker bounds needed for error reporting and multithreaded
/// sweeps. `f32` and `f64` satisfy it out of the box.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Convert an `f64` constant into the working scalar type.
///
/// Panics only if `T` cannot represent ordinary finite values, which cannot
/// happen for IEEE floating-point types.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant must convert into the scalar type")
}

/// Convert a working-scalar value back to `f64`, e.g. for formatted output.
///
/// `Float` implies `NumCast`, so this is lossless for `f64` and a widening
/// conversion for `f32`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::cast(x).expect("float scalars convert to f64")
}
