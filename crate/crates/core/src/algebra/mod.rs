//! Exact arithmetic: coefficient fields, sparse multivariate polynomials,
//! rational functions and univariate helpers.

mod coefficient;
mod monomial;
mod poly;
mod rational;
mod univariate;
mod vars;

pub use coefficient::Coefficient;
pub use monomial::Monomial;
pub use poly::{poly_arith, ArithOp, MPoly};
pub use rational::{Bindings, RationalFunction};
pub use univariate::UPoly;
pub use vars::VarSet;
