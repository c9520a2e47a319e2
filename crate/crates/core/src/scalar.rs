//! Floating-point scalar used by the statevector and closed-form modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Exact integer ratio evaluated with a single rounding step.
    fn ratio(num: u64, den: u64) -> Self {
        Self::lit(num as f64 / den as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}
