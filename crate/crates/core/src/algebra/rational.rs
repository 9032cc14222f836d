use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use super::{Coefficient, MPoly, VarSet};
use crate::error::{Error, Result};

/// Map from variable name to the rational function substituted for it.
pub type Bindings<C> = BTreeMap<String, RationalFunction<C>>;

/// Quotient of two polynomials over the same variable set.
///
/// Kept in a light canonical form: the greatest common monomial of numerator
/// and denominator is cancelled and the denominator's leading coefficient is 1.
/// No polynomial gcd is taken, so equality is decided by cross-multiplication.
#[derive(Clone)]
pub struct RationalFunction<C> {
    num: MPoly<C>,
    den: MPoly<C>,
}

impl<C: Coefficient> RationalFunction<C> {
    pub fn new(num: MPoly<C>, den: MPoly<C>) -> Result<Self> {
        num.vars().check_same(den.vars())?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: MPoly<C>, den: MPoly<C>) -> Self {
        if num.is_zero() {
            let vars = den.vars().clone();
            return RationalFunction { num, den: MPoly::one(vars) };
        }
        let g = num.monomial_content().zip(den.monomial_content()).map(|(a, b)| a.gcd(&b)).expect("both nonzero");
        let (num, den) =
            if g.is_one() { (num, den) } else { (num.div_monomial(&g).unwrap(), den.div_monomial(&g).unwrap()) };
        let lc = den.leading_term().map(|(_, c)| c.clone()).unwrap();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = C::one() / lc;
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: MPoly<C>) -> Self {
        let vars = p.vars().clone();
        RationalFunction { num: p, den: MPoly::one(vars) }
    }

    pub fn zero(vars: VarSet) -> Self {
        Self::from_poly(MPoly::zero(vars))
    }

    pub fn one(vars: VarSet) -> Self {
        Self::from_poly(MPoly::one(vars))
    }

    pub fn constant(vars: VarSet, c: C) -> Self {
        Self::from_poly(MPoly::constant(vars, c))
    }

    pub fn num(&self) -> &MPoly<C> {
        &self.num
    }

    pub fn den(&self) -> &MPoly<C> {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The polynomial this equals, when the denominator is a constant.
    pub fn as_polynomial(&self) -> Option<MPoly<C>> {
        if self.den.is_constant() {
            Some(self.num.scale(&(C::one() / self.den.constant_term())))
        } else {
            None
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.vars().check_same(other.vars())?;
        if self.den == other.den {
            return Ok(Self::canonical(&self.num + &other.num, self.den.clone()));
        }
        if self.den.is_monomial() && other.den.is_monomial() {
            let (ma, ca) = self.den.leading_term().unwrap();
            let (mb, cb) = other.den.leading_term().unwrap();
            let l = ma.lcm(mb);
            let fa = l.div(ma).unwrap();
            let fb = l.div(mb).unwrap();
            let num = &self.num.mul_monomial(&fa).scale(&(C::one() / ca.clone()))
                + &other.num.mul_monomial(&fb).scale(&(C::one() / cb.clone()));
            let den = MPoly::from_monomial(self.vars().clone(), l, C::one());
            return Ok(Self::canonical(num, den));
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Ok(Self::canonical(num, &self.den * &other.den))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.vars().check_same(other.vars())?;
        Ok(Self::canonical(&self.num * &other.num, &self.den * &other.den))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.vars().check_same(other.vars())?;
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(&self.num * &other.den, &self.den * &other.num))
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::canonical(self.num.scale(c), self.den.clone())
    }

    /// Integer power; negative exponents invert (error on zero).
    pub fn powi(&self, n: i32) -> Result<Self> {
        let (num, den) = (self.num.pow(n.unsigned_abs()), self.den.pow(n.unsigned_abs()));
        if n >= 0 {
            Ok(Self::canonical(num, den))
        } else {
            Self::new(den, num)
        }
    }

    pub fn partial_at(&self, idx: usize) -> Self {
        let dn = self.num.partial_at(idx);
        let dd = self.den.partial_at(idx);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::canonical(num, &self.den * &self.den)
    }

    pub fn partial_derivative(&self, name: &str) -> Result<Self> {
        let idx = self.vars().require(name)?;
        Ok(self.partial_at(idx))
    }

    /// Exact evaluation; fails when the denominator vanishes at the point.
    pub fn eval(&self, point: &[C]) -> Result<C> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Composition with one rational binding per variable (positional).
    pub fn compose(&self, bindings: &[RationalFunction<C>]) -> Result<Self> {
        let n = compose_poly(&self.num, bindings)?;
        let d = compose_poly(&self.den, bindings)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        n.try_div(&d)
    }

    /// Substitution by name; every variable must be bound.
    pub fn substitute(&self, bindings: &Bindings<C>) -> Result<Self> {
        self.compose(&positional(self.vars(), bindings)?)
    }

    pub fn with_vars(&self, vars: VarSet) -> Result<Self> {
        Ok(RationalFunction { num: self.num.with_vars(vars.clone())?, den: self.den.with_vars(vars)? })
    }
}

fn positional<C: Coefficient>(vars: &VarSet, bindings: &Bindings<C>) -> Result<Vec<RationalFunction<C>>> {
    vars.names().iter().map(|n| bindings.get(n).cloned().ok_or_else(|| Error::UnboundVariable(n.clone()))).collect()
}

fn compose_poly<C: Coefficient>(p: &MPoly<C>, bindings: &[RationalFunction<C>]) -> Result<RationalFunction<C>> {
    if bindings.len() != p.vars().len() {
        return Err(Error::Structure(format!("expected {} bindings, got {}", p.vars().len(), bindings.len())));
    }
    let target = bindings.first().map(|b| b.vars().clone()).ok_or_else(|| Error::Structure("no bindings".into()))?;
    for b in bindings {
        b.vars().check_same(&target)?;
    }
    // Shortcut when every binding is polynomial: one exact polynomial composition.
    if bindings.iter().all(|b| b.den.is_constant()) {
        let polys: Vec<_> = bindings.iter().map(|b| b.as_polynomial().unwrap()).collect();
        return Ok(RationalFunction::from_poly(p.compose(&polys)?));
    }
    let mut acc = RationalFunction::zero(target.clone());
    for (m, c) in p.terms() {
        let mut term = RationalFunction::constant(target.clone(), c.clone());
        for (b, &e) in bindings.iter().zip(m.exps()) {
            if e > 0 {
                term = term.try_mul(&b.powi(e as i32)?)?;
            }
        }
        acc = acc.try_add(&term)?;
    }
    Ok(acc)
}

impl<C: Coefficient> MPoly<C> {
    /// Substitution by name, producing a rational function in the bindings' variables.
    pub fn substitute(&self, bindings: &Bindings<C>) -> Result<RationalFunction<C>> {
        compose_poly(self, &positional(self.vars(), bindings)?)
    }
}

impl<C: Coefficient> PartialEq for RationalFunction<C> {
    fn eq(&self, other: &Self) -> bool {
        self.vars() == other.vars() && &self.num * &other.den == &other.num * &self.den
    }
}

impl<C: Coefficient> From<MPoly<C>> for RationalFunction<C> {
    fn from(p: MPoly<C>) -> Self {
        Self::from_poly(p)
    }
}

impl<C: Coefficient + Signed> fmt::Display for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_polynomial() {
            return write!(f, "{p}");
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.num_terms() > 1 || !self.den.is_monomial() {
            write!(f, "/({})", self.den)
        } else {
            let (m, c) = self.den.leading_term().unwrap();
            let simple = c.is_one() && m.exps().iter().filter(|&&e| e > 0).count() <= 1;
            if simple {
                write!(f, "/{}", self.den)
            } else {
                write!(f, "/({})", self.den)
            }
        }
    }
}

impl<C: Coefficient> fmt::Debug for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QPoly, QRational, Rat};

    fn xtz() -> VarSet {
        VarSet::new(["x", "t", "z"]).unwrap()
    }

    fn p(vars: &VarSet, name: &str) -> QPoly {
        QPoly::var(vars.clone(), name).unwrap()
    }

    fn chart_bindings() -> Bindings<Rat> {
        let t = xtz();
        let x = p(&t, "x");
        let mut b = Bindings::new();
        b.insert("x".into(), x.clone().into());
        b.insert("y".into(), (&p(&t, "t") * &x).into());
        b.insert("z".into(), p(&t, "z").into());
        b
    }

    #[test]
    fn hf_pulls_back_to_t2_minus_x() {
        let v = VarSet::xyz();
        let (x, y) = (p(&v, "x"), p(&v, "y"));
        let hf = QRational::new(&y.pow(2) - &x.pow(3), x.pow(2)).unwrap();
        let got = hf.substitute(&chart_bindings()).unwrap();
        let t = xtz();
        let expect = &p(&t, "t").pow(2) - &p(&t, "x");
        assert_eq!(got.as_polynomial().unwrap(), expect);
        assert_eq!(got.to_string(), "t^2 - x");
    }

    #[test]
    fn identity_binding() {
        let v = VarSet::xyz();
        let x = p(&v, "x");
        let mut b = Bindings::new();
        for n in ["x", "y", "z"] {
            b.insert(n.into(), p(&v, n).into());
        }
        assert_eq!(x.substitute(&b).unwrap().as_polynomial().unwrap(), x);
    }

    #[test]
    fn second_chart_substitution() {
        let v = VarSet::xyz();
        let gf = &p(&v, "x") * &p(&v, "z");
        let target = VarSet::new(["u", "y", "z"]).unwrap();
        let mut b = Bindings::new();
        b.insert("x".into(), (&p(&target, "u") * &p(&target, "y")).into());
        b.insert("y".into(), p(&target, "y").into());
        b.insert("z".into(), p(&target, "z").into());
        let got = gf.substitute(&b).unwrap().as_polynomial().unwrap();
        assert_eq!(got, &(&p(&target, "u") * &p(&target, "y")) * &p(&target, "z"));
    }

    #[test]
    fn unbound_variable() {
        let v = VarSet::xyz();
        let mut b = chart_bindings();
        b.remove("z");
        assert_eq!(p(&v, "z").substitute(&b), Err(Error::UnboundVariable("z".into())));
    }

    #[test]
    fn symbolic_zero_denominator() {
        let v = VarSet::xyz();
        let r = QRational::new(QPoly::one(v.clone()), &p(&v, "x") - &p(&v, "y")).unwrap();
        let mut b = Bindings::new();
        b.insert("x".into(), p(&v, "y").into());
        b.insert("y".into(), p(&v, "y").into());
        b.insert("z".into(), p(&v, "z").into());
        assert_eq!(r.substitute(&b), Err(Error::ZeroDenominator));
    }

    #[test]
    fn canonical_form_normalizes_denominator() {
        let v = VarSet::xyz();
        let (x, y) = (p(&v, "x"), p(&v, "y"));
        let two = QPoly::constant(v.clone(), Rat::from_integer(2.into()));
        let r = QRational::new(&x * &y, &(&two * &x) * &y.pow(2)).unwrap();
        assert_eq!(r.num(), &QPoly::constant(v.clone(), Rat::new(1.into(), 2.into())));
        assert_eq!(r.den(), &y);
        assert_eq!(r.to_string(), "1/2/y");
    }

    #[test]
    fn quotient_rule() {
        let v = VarSet::xyz();
        let (x, y) = (p(&v, "x"), p(&v, "y"));
        let r = QRational::new(x.clone(), y.clone()).unwrap();
        let dy = r.partial_derivative("y").unwrap();
        assert_eq!(dy, QRational::new(-&x, y.pow(2)).unwrap());
    }
}
