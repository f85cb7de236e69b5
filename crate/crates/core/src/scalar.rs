//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra as na;
use num_traits as nt;
use std::fmt::{Debug, Display, LowerExp};

/// Real floating-point scalar the library is generic over (`f32` or `f64`).
///
/// Arithmetic and elementary functions come from [`na::RealField`]; the
/// num-traits bounds supply constants and lossless conversion to and from
/// `f64` literals.
pub trait Scalar:
    na::RealField
    + Copy
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + Debug
    + Display
    + LowerExp
{
    /// Machine epsilon of the type, widened to `f64`.
    const EPSILON: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn machine_epsilon() -> Self {
        Self::lit(Self::EPSILON)
    }

    #[inline]
    fn finite(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Scalar for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Scalar for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

pub(crate) fn all_finite<T: Scalar>(m: &na::DMatrix<T>) -> bool {
    m.iter().all(|x| x.finite())
}
