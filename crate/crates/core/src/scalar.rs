//! Scalar abstraction for the matrix kernel.
//!
//! Everything in [`crate::linalg`], [`crate::states`] and [`crate::entropy`] is
//! written against [`Real`], so the same code runs in `f32` and `f64`.
//! Threshold and bound evaluators are pinned to `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable as the component type of a complex matrix.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Tolerance request `x`, widened to what the precision can actually resolve.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(512.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Real>::tol(1e-10), 1e-10);
        assert!(<f32 as Real>::tol(1e-10) > 1e-5);
    }
}
