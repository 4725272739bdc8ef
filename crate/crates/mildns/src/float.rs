use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole toolkit is generic over.
///
/// `f64` is the working precision; `f32` compiles and runs but the default
/// tolerances in the doc examples and tests assume double precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + rustfft::FftNum
{
    /// Shorthand for pulling an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// Lossy view back into `f64`, for error payloads and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
