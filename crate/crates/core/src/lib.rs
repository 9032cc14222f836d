//! Exact and numeric verification toolkit for singular holomorphic foliations
//! on (C^3, 0): first integrals (polynomial, rational and Darboux), blow-ups
//! along the z-axis and at the origin, linear parts and Baum-Bott indices,
//! the dicritical-surface classification from factored first integrals, and
//! complex-time leaf tracing.
//!
//! The symbolic layer is generic over a [`Coefficient`] field; the aliases
//! below fix it to exact rationals, which is what every computation in this
//! crate is checked with. Numerics are generic over `num_traits::Float`.

pub mod algebra;
pub mod blowup;
pub mod catalog;
pub mod dicritical;
pub mod error;
pub mod foliation;
pub mod numerics;
pub mod singular;

pub use algebra::{Coefficient, MPoly, Monomial, RationalFunction, UPoly, VarSet};
pub use error::{Error, Result};
pub use foliation::{DarbouxFunction, VectorField};

/// Exact rational scalar.
pub type Rat = num_rational::BigRational;
pub type QPoly = MPoly<Rat>;
pub type QRational = RationalFunction<Rat>;
pub type QField = VectorField<Rat>;
pub type QDarboux = DarbouxFunction<Rat>;
pub type QUPoly = UPoly<Rat>;

/// Double-precision complex scalar used by the numerics.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Shorthand for `n / d`; panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}
