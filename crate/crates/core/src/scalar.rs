//! Scalar abstraction for the geometry layer.
//!
//! The hyperbolic-trigonometry core is generic over the floating-point type;
//! everything metric-graph and up is instantiated at `f64` (see the aliases
//! at the crate root).

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the geometry core: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossless embedding of an `f64` constant into the scalar type.
    ///
    /// Panics only if the conversion is unrepresentable, which cannot happen
    /// for finite constants and `f32`/`f64`.
    fn from_f64_const(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }

    /// Clamped `acosh`: treats arguments in `[1 - eps, 1)` as exactly 1 so
    /// that roundoff below the branch point does not produce NaN.
    fn acosh_clamped(self) -> Self {
        if self < Self::one() {
            Self::zero()
        } else {
            self.acosh()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
