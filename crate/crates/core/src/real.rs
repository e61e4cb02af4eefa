//! Scalar abstraction: the whole pipeline is generic over the floating-point
//! type, with `f64` as the default working precision (see the aliases at the
//! crate root).

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the dynamics are computed in (f32 or f64).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + core::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Shorthand for converting an `f64` literal into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable in scalar type")
    }

    /// Lossy view as `f64`, used for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn lit<S: Real>(x: f64) -> S {
    S::of(x)
}
