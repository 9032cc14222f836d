use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;

use super::{Coefficient, Monomial, VarSet};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial over a fixed, ordered variable set.
///
/// Terms are kept in a map keyed by graded-lex exponent vectors; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MPoly<C> {
    vars: VarSet,
    terms: BTreeMap<Monomial, C>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation on two polynomials over the same variable set.
pub fn poly_arith<C: Coefficient>(a: &MPoly<C>, b: &MPoly<C>, op: ArithOp) -> Result<MPoly<C>> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

impl<C: Coefficient> MPoly<C> {
    pub fn zero(vars: VarSet) -> Self {
        MPoly { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: VarSet) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn constant(vars: VarSet, c: C) -> Self {
        let n = vars.len();
        Self::from_monomial(vars, Monomial::one(n), c)
    }

    pub fn from_monomial(vars: VarSet, m: Monomial, c: C) -> Self {
        assert_eq!(m.len(), vars.len(), "monomial arity must match the variable set");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { vars, terms }
    }

    pub fn var(vars: VarSet, name: &str) -> Result<Self> {
        let idx = vars.require(name)?;
        Ok(Self::var_at(vars, idx))
    }

    pub fn var_at(vars: VarSet, idx: usize) -> Self {
        let n = vars.len();
        Self::from_monomial(vars, Monomial::var(n, idx, 1), C::one())
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(vars: VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent arity must match the variable set");
            p.add_term(Monomial::new(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&Monomial::one(self.vars.len()))
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exps()[idx]).max()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let mut out = Self::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect() }
    }

    /// Exact division by a monomial, `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            terms.insert(t.div(m)?, c.clone());
        }
        Some(MPoly { vars: self.vars.clone(), terms })
    }

    /// Greatest monomial dividing every term; `None` for zero.
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |g, m| g.gcd(m)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.vars.clone());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial_derivative(&self, name: &str) -> Result<Self> {
        let idx = self.vars.require(name)?;
        Ok(self.partial_at(idx))
    }

    pub fn partial_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.exps()[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[idx] -= 1;
            out.add_term(Monomial::new(exps), c.clone() * C::from_int(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[C]) -> C {
        self.eval_with(point, |c| c.clone())
    }

    /// Evaluates in another ring `T`, converting each coefficient with `conv`.
    pub fn eval_with<T, F>(&self, point: &[T], conv: F) -> T
    where
        T: Clone + num_traits::Num,
        F: Fn(&C) -> T,
    {
        assert_eq!(point.len(), self.vars.len(), "point arity must match the variable set");
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = conv(c);
            for (x, &e) in point.iter().zip(m.exps()) {
                if e > 0 {
                    term = term * num_traits::pow(x.clone(), e as usize);
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Composition `p(b_1, ..., b_n)` with one polynomial binding per variable.
    /// All bindings must share a (target) variable set.
    pub fn compose(&self, bindings: &[MPoly<C>]) -> Result<MPoly<C>> {
        if bindings.len() != self.vars.len() {
            return Err(Error::Structure(format!("expected {} bindings, got {}", self.vars.len(), bindings.len())));
        }
        let target = bindings.first().map(|b| b.vars.clone()).ok_or_else(|| Error::Structure("no bindings".into()))?;
        for b in bindings {
            b.vars.check_same(&target)?;
        }
        let mut powers: Vec<Vec<MPoly<C>>> =
            bindings.iter().map(|b| vec![MPoly::one(target.clone()), b.clone()]).collect();
        let mut out = MPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(target.clone(), c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Writes `self = v^k * q` with `v` not dividing `q`.
    pub fn divide_out_variable(&self, name: &str) -> Result<(u32, Self)> {
        let idx = self.vars.require(name)?;
        self.divide_out_at(idx)
    }

    pub fn divide_out_at(&self, idx: usize) -> Result<(u32, Self)> {
        let k = self.min_exponent(idx).ok_or(Error::ZeroPolynomial("multiplicity of the zero polynomial"))?;
        let q =
            self.div_monomial(&Monomial::var(self.vars.len(), idx, k)).expect("minimum exponent divides every term");
        Ok((k, q))
    }

    /// Smallest exponent of variable `idx` over all terms.
    pub fn min_exponent(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exps()[idx]).min()
    }

    pub fn homogeneous_component(&self, d: u32) -> Self {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Sets variable `idx` to zero and drops it from the variable set.
    pub fn restrict_zero_drop(&self, idx: usize) -> Self {
        MPoly {
            vars: self.vars.without(idx),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exps()[idx] == 0)
                .map(|(m, c)| (m.without(idx), c.clone()))
                .collect(),
        }
    }

    /// True when `self = c * other` for a nonzero constant `c`.
    pub fn is_proportional(&self, other: &Self) -> bool {
        if self.vars != other.vars || self.terms.len() != other.terms.len() {
            return false;
        }
        match (self.leading_term(), other.leading_term()) {
            (Some((_, a)), Some((_, b))) => self.scale(b) == other.scale(a),
            (None, None) => true,
            _ => false,
        }
    }

    /// Same terms reinterpreted over another variable set of equal arity.
    pub fn with_vars(&self, vars: VarSet) -> Result<Self> {
        if vars.len() != self.vars.len() {
            return Err(Error::VarSetMismatch { left: self.vars.to_string(), right: vars.to_string() });
        }
        Ok(MPoly { vars, terms: self.terms.clone() })
    }

    pub fn map_coefficients<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> MPoly<D> {
        let mut out = MPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<C: Coefficient + PartialOrd> MPoly<C> {
    /// Total order comparing terms from the largest monomial down.
    pub fn grlex_cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let o = ma.cmp(mb).then_with(|| ca.partial_cmp(cb).unwrap_or(Ordering::Equal));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, C: Coefficient> $tr<&'a MPoly<C>> for &'a MPoly<C> {
            type Output = MPoly<C>;
            fn $method(self, rhs: &'a MPoly<C>) -> MPoly<C> {
                self.$checked(rhs).expect("polynomial operands share a variable set")
            }
        }
        impl<C: Coefficient> $tr for MPoly<C> {
            type Output = MPoly<C>;
            fn $method(self, rhs: MPoly<C>) -> MPoly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl<C: Coefficient> Neg for &MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Coefficient> Neg for MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        -&self
    }
}

pub(crate) fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &VarSet, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(vars.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Terms in descending graded-lex order, e.g. `t^2 - x` or `3/2*x*y + 1`.
impl<C: Coefficient + Signed> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, &self.vars, m)?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{}](", self.vars)?;
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if !m.is_one() {
                f.write_str("*")?;
                write_monomial(f, &self.vars, m)?;
            }
        }
        f.write_str(")")
    }
}
