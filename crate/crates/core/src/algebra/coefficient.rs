use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// A field of polynomial coefficients.
///
/// Exact work uses `BigRational`; `f64`/`f32` satisfy the same bound and are
/// useful for quick floating evaluation of the same symbolic objects.
pub trait Coefficient:
    Clone + PartialEq + Debug + Display + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer is representable")
    }
}

impl<T> Coefficient for T where
    T: Clone + PartialEq + Debug + Display + Num + Neg<Output = T> + FromPrimitive + Send + Sync + 'static
{
}
