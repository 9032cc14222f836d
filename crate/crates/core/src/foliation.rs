//! Vector fields acting as derivations, first-integral verification and
//! functional independence.

use std::fmt;

use num_traits::Signed;

use crate::algebra::{Coefficient, MPoly, RationalFunction, VarSet};
use crate::error::{Error, Result};

/// Polynomial vector field `a_1 ∂_1 + ... + a_n ∂_n`, one component per variable.
#[derive(Clone, PartialEq, Debug)]
pub struct VectorField<C: Coefficient> {
    components: Vec<MPoly<C>>,
}

impl<C: Coefficient> VectorField<C> {
    pub fn new(components: Vec<MPoly<C>>) -> Result<Self> {
        let vars = components
            .first()
            .map(|c| c.vars().clone())
            .ok_or_else(|| Error::Structure("vector field without components".into()))?;
        for c in &components {
            c.vars().check_same(&vars)?;
        }
        if components.len() != vars.len() {
            return Err(Error::Structure(format!("{} components over {} variables", components.len(), vars.len())));
        }
        if components.iter().all(MPoly::is_zero) {
            return Err(Error::Structure("vector field is identically zero".into()));
        }
        Ok(VectorField { components })
    }

    pub fn vars(&self) -> &VarSet {
        self.components[0].vars()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MPoly<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MPoly<C> {
        &self.components[i]
    }

    pub fn lie_derivative(&self, p: &MPoly<C>) -> Result<MPoly<C>> {
        self.vars().check_same(p.vars())?;
        let mut acc = MPoly::zero(self.vars().clone());
        for (i, a) in self.components.iter().enumerate() {
            acc = &acc + &(a * &p.partial_at(i));
        }
        Ok(acc)
    }

    pub fn lie_derivative_rational(&self, r: &RationalFunction<C>) -> Result<RationalFunction<C>> {
        self.vars().check_same(r.vars())?;
        let n = self.lie_derivative(r.num())?;
        let d = self.lie_derivative(r.den())?;
        let num = &(&n * r.den()) - &(r.num() * &d);
        RationalFunction::new(num, r.den() * r.den())
    }

    pub fn eval(&self, point: &[C]) -> Vec<C> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }
}

impl<C: Coefficient + Signed> fmt::Display for VectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `R · exp(S)` with rational `R ≢ 0` and rational `S`. `S = 0` covers plain
/// polynomial and rational functions.
#[derive(Clone, PartialEq, Debug)]
pub struct DarbouxFunction<C: Coefficient> {
    prefactor: RationalFunction<C>,
    exponent: RationalFunction<C>,
}

impl<C: Coefficient> DarbouxFunction<C> {
    pub fn new(prefactor: RationalFunction<C>, exponent: RationalFunction<C>) -> Result<Self> {
        prefactor.vars().check_same(exponent.vars())?;
        if prefactor.is_zero() {
            return Err(Error::Structure("Darboux prefactor is identically zero".into()));
        }
        Ok(DarbouxFunction { prefactor, exponent })
    }

    pub fn rational(r: RationalFunction<C>) -> Result<Self> {
        let zero = RationalFunction::zero(r.vars().clone());
        Self::new(r, zero)
    }

    pub fn polynomial(p: MPoly<C>) -> Result<Self> {
        Self::rational(RationalFunction::from_poly(p))
    }

    pub fn prefactor(&self) -> &RationalFunction<C> {
        &self.prefactor
    }

    pub fn exponent(&self) -> &RationalFunction<C> {
        &self.exponent
    }

    pub fn vars(&self) -> &VarSet {
        self.prefactor.vars()
    }

    pub fn is_rational(&self) -> bool {
        self.exponent.is_zero()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        Self::new(self.prefactor.try_mul(&other.prefactor)?, self.exponent.try_add(&other.exponent)?)
    }

    /// The exponential-free factor of `∂_i (R e^S)`, namely `∂_i R + R ∂_i S`.
    pub fn gradient_factor(&self, i: usize) -> RationalFunction<C> {
        let dr = self.prefactor.partial_at(i);
        let ds = self.exponent.partial_at(i);
        dr.try_add(&self.prefactor.try_mul(&ds).expect("same variables")).expect("same variables")
    }

    /// Numeric value `R(p) e^{S(p)}` in a complex float type; `None` when a
    /// denominator is smaller than `floor` in modulus.
    pub fn eval_complex<T>(&self, point: &[num_complex::Complex<T>], floor: T) -> Option<num_complex::Complex<T>>
    where
        T: num_traits::Float,
        C: num_traits::ToPrimitive,
    {
        let conv = |c: &C| num_complex::Complex::new(T::from(c.to_f64().unwrap_or(f64::NAN)).unwrap(), T::zero());
        let rd = self.prefactor.den().eval_with(point, conv);
        let sd = self.exponent.den().eval_with(point, conv);
        if rd.norm() < floor || sd.norm() < floor {
            return None;
        }
        let r = self.prefactor.num().eval_with(point, conv) / rd;
        let s = self.exponent.num().eval_with(point, conv) / sd;
        Some(r * s.exp())
    }
}

impl<C: Coefficient + Signed> fmt::Display for DarbouxFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.prefactor);
        }
        let pre = self.prefactor.to_string();
        let needs_parens = self.prefactor.as_polynomial().is_none_or(|p| p.num_terms() > 1);
        if self.prefactor.as_polynomial().is_some_and(|p| p == MPoly::one(self.vars().clone())) {
            write!(f, "exp({})", self.exponent)
        } else if needs_parens {
            write!(f, "({pre})*exp({})", self.exponent)
        } else {
            write!(f, "{pre}*exp({})", self.exponent)
        }
    }
}

/// `v(p) = Σ a_i ∂_i p`.
pub fn lie_derivative<C: Coefficient>(v: &VectorField<C>, p: &MPoly<C>) -> Result<MPoly<C>> {
    v.lie_derivative(p)
}

/// The exponential-free factor of `v(R e^S)`, i.e. `v(R) + R v(S)`.
pub fn darboux_lie_derivative<C: Coefficient>(
    v: &VectorField<C>,
    d: &DarbouxFunction<C>,
) -> Result<RationalFunction<C>> {
    let vr = v.lie_derivative_rational(d.prefactor())?;
    let vs = v.lie_derivative_rational(d.exponent())?;
    vr.try_add(&d.prefactor().try_mul(&vs)?)
}

/// Decides `v(R e^S) ≡ 0` through the cleared identity
/// `(v(n) d - n v(d)) b² + n d (v(a) b - a v(b)) ≡ 0` for `R = n/d`, `S = a/b`.
pub fn darboux_lie_derivative_vanishes<C: Coefficient>(v: &VectorField<C>, d: &DarbouxFunction<C>) -> Result<bool> {
    v.vars().check_same(d.vars())?;
    let (n, dd) = (d.prefactor().num(), d.prefactor().den());
    let (a, b) = (d.exponent().num(), d.exponent().den());
    let vn = v.lie_derivative(n)?;
    let vd = v.lie_derivative(dd)?;
    let va = v.lie_derivative(a)?;
    let vb = v.lie_derivative(b)?;
    let lhs = &(&(&vn * dd) - &(n * &vd)) * &(b * b);
    let rhs = &(n * dd) * &(&(&va * b) - &(a * &vb));
    Ok((&lhs + &rhs).is_zero())
}

/// Outcome of the Jacobian-minor independence test.
#[derive(Clone, PartialEq, Debug)]
pub enum Independence<C: Coefficient> {
    Dependent,
    /// `minor` is the (exponential-free) 2×2 minor `∂(F,G)/∂(first, second)`.
    Independent {
        first: String,
        second: String,
        minor: RationalFunction<C>,
    },
}

impl<C: Coefficient> Independence<C> {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent { .. })
    }
}

/// Returns the first nonvanishing 2×2 minor of the Jacobian of `(F, G)`, in
/// lexicographic order of variable pairs, or `Dependent` if all vanish.
pub fn independence_witness<C: Coefficient>(f: &DarbouxFunction<C>, g: &DarbouxFunction<C>) -> Result<Independence<C>> {
    f.vars().check_same(g.vars())?;
    let n = f.vars().len();
    let df: Vec<_> = (0..n).map(|i| f.gradient_factor(i)).collect();
    let dg: Vec<_> = (0..n).map(|i| g.gradient_factor(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let minor = df[i].try_mul(&dg[j])?.try_sub(&df[j].try_mul(&dg[i])?)?;
            if !minor.is_zero() {
                return Ok(Independence::Independent {
                    first: f.vars().name(i).to_string(),
                    second: f.vars().name(j).to_string(),
                    minor,
                });
            }
        }
    }
    Ok(Independence::Dependent)
}

/// Restricts `v` to the invariant coordinate hyperplane `{var = 0}`, dropping
/// the normal component. Fails if the plane is not invariant.
pub fn restrict_to_coordinate_plane<C: Coefficient>(v: &VectorField<C>, var: &str) -> Result<VectorField<C>> {
    let idx = v.vars().require(var)?;
    if !v.component(idx).restrict_zero_drop(idx).is_zero() {
        return Err(Error::Domain(format!("plane {{{var} = 0}} is not invariant")));
    }
    let comps =
        v.components().iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, c)| c.restrict_zero_drop(idx)).collect();
    VectorField::new(comps).map_err(|_| Error::Domain(format!("restriction to {{{var} = 0}} vanishes identically")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::{rat, QDarboux, QField, QPoly, QRational};

    fn v(name: &str) -> QPoly {
        QPoly::var(VarSet::xyz(), name).unwrap()
    }

    fn k(n: i64) -> QPoly {
        QPoly::constant(VarSet::xyz(), rat(n))
    }

    fn diag(a: i64, b: i64, c: i64) -> QField {
        QField::new(vec![&k(a) * &v("x"), &k(b) * &v("y"), &k(c) * &v("z")]).unwrap()
    }

    #[test]
    fn holomorphic_integrals_of_x() {
        let x = catalog::field_x();
        let (ff, gf) = catalog::holomorphic_integrals();
        assert!(lie_derivative(&x, &ff).unwrap().is_zero());
        assert!(lie_derivative(&x, &gf).unwrap().is_zero());
    }

    #[test]
    fn linear_field_on_xy() {
        let got = lie_derivative(&diag(1, 1, -1), &(&v("x") * &v("y"))).unwrap();
        assert_eq!(got, &k(2) * &(&v("x") * &v("y")));
    }

    #[test]
    fn transcendent_integrals_of_y() {
        let y = catalog::field_y();
        let (hm, gm) = catalog::transcendent_integrals();
        assert!(darboux_lie_derivative_vanishes(&y, &hm).unwrap());
        assert!(darboux_lie_derivative(&y, &hm).unwrap().is_zero());
        // the printed G_M is not annihilated: Y(G)/G = y³/x
        assert!(!darboux_lie_derivative_vanishes(&y, &gm).unwrap());
        let yz = QDarboux::polynomial(&v("y") * &v("z")).unwrap();
        assert!(darboux_lie_derivative_vanishes(&y, &yz).unwrap());
    }

    #[test]
    fn x_is_not_an_integral() {
        let d = QDarboux::polynomial(v("x")).unwrap();
        assert!(!darboux_lie_derivative_vanishes(&catalog::field_x(), &d).unwrap());
    }

    #[test]
    fn independence_examples() {
        let xz = QDarboux::polynomial(&v("x") * &v("z")).unwrap();
        let yz = QDarboux::polynomial(&v("y") * &v("z")).unwrap();
        assert_eq!(independence_witness(&xz, &xz).unwrap(), Independence::Dependent);
        match independence_witness(&xz, &yz).unwrap() {
            Independence::Independent { first, second, minor } => {
                assert_eq!((first.as_str(), second.as_str()), ("x", "y"));
                assert_eq!(minor, QRational::from_poly(v("z").pow(2)));
            }
            other => panic!("expected independence, got {other:?}"),
        }
        let (ff, gf) = catalog::holomorphic_integrals();
        let r = independence_witness(&QDarboux::polynomial(ff).unwrap(), &QDarboux::polynomial(gf).unwrap()).unwrap();
        assert!(r.is_independent());
    }

    #[test]
    fn restrictions_to_z_plane() {
        let vars = VarSet::new(["x", "y"]).unwrap();
        let x = QPoly::var(vars.clone(), "x").unwrap();
        let y = QPoly::var(vars.clone(), "y").unwrap();
        let two = QPoly::constant(vars.clone(), rat(2));
        let rx = restrict_to_coordinate_plane(&catalog::field_x(), "z").unwrap();
        assert_eq!(rx.components(), &[&(&two * &x) * &y, &x.pow(3) + &(&two * &y.pow(2))]);
        let ry = restrict_to_coordinate_plane(&catalog::field_y(), "z").unwrap();
        let a = &x * &(&(&x - &(&two * &y.pow(2))) - &y);
        let b = &y * &(&(&x - &y.pow(2)) - &y);
        assert_eq!(ry.components(), &[a, b]);
        let rl = restrict_to_coordinate_plane(&diag(1, 1, -1), "z").unwrap();
        assert_eq!(rl.components(), &[x, y]);
    }

    #[test]
    fn non_invariant_plane() {
        let f = QField::new(vec![k(1), v("y"), v("z")]).unwrap();
        assert!(matches!(restrict_to_coordinate_plane(&f, "x"), Err(Error::Domain(_))));
    }
}
