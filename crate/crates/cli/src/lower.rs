use std::fmt;

use foliage_core::{QDarboux, QPoly, QRational, VarSet};
use thiserror::Error;

use crate::expr::Expr;

/// What an expression denotes once lowered.
#[derive(Clone, Debug, PartialEq)]
pub enum Semantic {
    Poly(QPoly),
    Rational(QRational),
    Darboux(QDarboux),
}

impl Semantic {
    pub fn kind(&self) -> &'static str {
        match self {
            Semantic::Poly(_) => "polynomial",
            Semantic::Rational(_) => "rational",
            Semantic::Darboux(_) => "darboux",
        }
    }

    pub fn into_darboux(self) -> Result<QDarboux, LowerError> {
        let d = match self {
            Semantic::Poly(p) => QDarboux::polynomial(p),
            Semantic::Rational(r) => QDarboux::rational(r),
            Semantic::Darboux(d) => Ok(d),
        };
        d.map_err(|e| LowerError { path: "root".into(), message: e.to_string() })
    }

    pub fn into_polynomial(self) -> Result<QPoly, LowerError> {
        match self {
            Semantic::Poly(p) => Ok(p),
            other => Err(LowerError {
                path: "root".into(),
                message: format!("expected a polynomial, got a {}", other.kind()),
            }),
        }
    }
}

impl fmt::Display for Semantic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantic::Poly(p) => write!(f, "{p}"),
            Semantic::Rational(r) => write!(f, "{r}"),
            Semantic::Darboux(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at node {path}: {message}")]
pub struct LowerError {
    /// Dotted child indices from the root, e.g. `root.0.1`.
    pub path: String,
    pub message: String,
}

/// `r · exp(s)`; `s` absent means no exponential was seen.
struct Value {
    r: QRational,
    s: Option<QRational>,
}

fn fail(path: &str, message: impl Into<String>) -> LowerError {
    LowerError { path: path.into(), message: message.into() }
}

fn core_err(path: &str) -> impl Fn(foliage_core::Error) -> LowerError + '_ {
    move |e| fail(path, e.to_string())
}

fn add_exponents(
    a: Option<QRational>,
    b: Option<QRational>,
    sub: bool,
    path: &str,
) -> Result<Option<QRational>, LowerError> {
    Ok(match (a, b) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(if sub { b.neg() } else { b }),
        (Some(a), Some(b)) => Some(if sub { a.try_sub(&b) } else { a.try_add(&b) }.map_err(core_err(path))?),
    })
}

fn lower_node(e: &Expr, vars: &VarSet, path: &str) -> Result<Value, LowerError> {
    let child = |i: usize| format!("{path}.{i}");
    let plain = |r: QRational| Value { r, s: None };
    match e {
        Expr::Num(c) => Ok(plain(QRational::constant(vars.clone(), c.clone()))),
        Expr::Var(name) => {
            let p = QPoly::var(vars.clone(), name).map_err(core_err(path))?;
            Ok(plain(QRational::from_poly(p)))
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (x, y) = (lower_node(a, vars, &child(0))?, lower_node(b, vars, &child(1))?);
            if x.s.is_some() || y.s.is_some() {
                return Err(fail(path, "sums involving exp(...) are not supported; write a single R*exp(S)"));
            }
            let r = if matches!(e, Expr::Add(..)) { x.r.try_add(&y.r) } else { x.r.try_sub(&y.r) };
            Ok(plain(r.map_err(core_err(path))?))
        }
        Expr::Mul(a, b) => {
            let (x, y) = (lower_node(a, vars, &child(0))?, lower_node(b, vars, &child(1))?);
            Ok(Value { r: x.r.try_mul(&y.r).map_err(core_err(path))?, s: add_exponents(x.s, y.s, false, path)? })
        }
        Expr::Div(a, b) => {
            let (x, y) = (lower_node(a, vars, &child(0))?, lower_node(b, vars, &child(1))?);
            if y.r.is_zero() {
                return Err(fail(&child(1), "division by zero"));
            }
            Ok(Value { r: x.r.try_div(&y.r).map_err(core_err(path))?, s: add_exponents(x.s, y.s, true, path)? })
        }
        Expr::Neg(a) => {
            let x = lower_node(a, vars, &child(0))?;
            Ok(Value { r: x.r.neg(), s: x.s })
        }
        Expr::Pow(a, n) => {
            let x = lower_node(a, vars, &child(0))?;
            let k = i32::try_from(*n).map_err(|_| fail(path, "exponent too large"))?;
            let s = x.s.map(|s| s.scale(&foliage_core::rat(i64::from(*n))));
            Ok(Value { r: x.r.powi(k).map_err(core_err(path))?, s })
        }
        Expr::Exp(a) => {
            let x = lower_node(a, vars, &child(0))?;
            if x.s.is_some() {
                return Err(fail(&child(0), "nested exp(...) is not supported"));
            }
            Ok(Value { r: QRational::one(vars.clone()), s: Some(x.r) })
        }
    }
}

/// Polynomial when no `/` or `exp` survives, rational when only `/` does,
/// Darboux otherwise.
pub fn lower_to_semantics(e: &Expr, vars: &VarSet) -> Result<Semantic, LowerError> {
    let v = lower_node(e, vars, "root")?;
    match v.s {
        Some(s) if !s.is_zero() => {
            QDarboux::new(v.r, s).map(Semantic::Darboux).map_err(|e| fail("root", e.to_string()))
        }
        _ => Ok(match v.r.as_polynomial() {
            Some(p) => Semantic::Poly(p),
            None => Semantic::Rational(v.r),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use foliage_core::catalog;

    fn lower(s: &str) -> Result<Semantic, LowerError> {
        lower_to_semantics(&parse_expression(s, &VarSet::xyz()).unwrap(), &VarSet::xyz())
    }

    #[test]
    fn kinds() {
        let (f, _) = catalog::holomorphic_integrals();
        assert_eq!(lower("(y^2 - x^3)*z^2").unwrap(), Semantic::Poly(f));
        assert_eq!(lower("(y^2-x^3)/x^2").unwrap(), Semantic::Rational(catalog::meromorphic_integral()));
        let (h, g) = catalog::transcendent_integrals();
        assert_eq!(lower("(x/y)*exp((y^2+y)/x)").unwrap(), Semantic::Darboux(h));
        assert_eq!(lower("-y*exp(y/x)*z").unwrap(), Semantic::Darboux(g));
        // a cancelled denominator is still a polynomial
        assert!(matches!(lower("x^2*y/x").unwrap(), Semantic::Poly(_)));
        assert!(matches!(lower("x*exp(0)").unwrap(), Semantic::Poly(_)));
    }

    #[test]
    fn exponent_arithmetic() {
        let a = lower("exp(x)^2/exp(y)").unwrap();
        let b = lower("exp(2*x - y)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsupported_shapes_report_paths() {
        let e = lower("x + exp(y)").unwrap_err();
        assert_eq!(e.path, "root");
        let e = lower("x*exp(exp(y))").unwrap_err();
        assert_eq!(e.path, "root.1.0");
        let e = lower("x/(y - y)").unwrap_err();
        assert_eq!(e.path, "root.1");
    }
}
