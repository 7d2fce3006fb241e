//! Scalar abstraction shared by the form, spectral and potential modules.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use nalgebra::{ComplexField, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by every generic routine in the crate: `f32` or `f64`.
pub trait Scalar:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Default
    + Display
    + Debug
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    #[inline]
    fn magnitude(self) -> Self {
        <Self as ComplexField>::abs(self)
    }

    /// Unit roundoff of the type.
    fn unit_roundoff() -> Self;
}

impl Scalar for f32 {
    fn unit_roundoff() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    fn unit_roundoff() -> Self {
        f64::EPSILON
    }
}

pub(crate) fn max_abs<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter()
        .fold(T::zero(), |acc, x| acc.max(x.magnitude()))
}
