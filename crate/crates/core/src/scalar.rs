//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the model can be evaluated in: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; panics only for values the type cannot represent at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Conversion from a count.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Maps a uniform in `[0, 1)` drawn as `f64` into `[0, 1)` of this type.
    /// Narrowing can round up to exactly one; those values are pulled back below one.
    fn unit_from_f64(u: f64) -> Self {
        let v = Self::lit(u);
        if v >= Self::one() {
            Self::one() - Self::epsilon()
        } else {
            v
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
