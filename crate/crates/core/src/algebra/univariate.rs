use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Coefficient;
use crate::Rat;

/// Dense univariate polynomial, coefficients from low to high degree.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> UPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The parameter itself.
    pub fn identity() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    /// `s - r`
    pub fn linear_root(r: C) -> Self {
        Self::new(vec![-r, C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn eval(&self, s: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(), |acc, c| acc * s.clone() + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(C::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(C::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(C::one()), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dl = divisor.leading().expect("division by the zero polynomial").clone();
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / dl.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&(C::one() / l.clone())),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * C::from_int(i as i64)).collect())
    }
}

impl UPoly<Rat> {
    /// Rational roots with multiplicity, plus the cofactor left after removing them.
    pub fn rational_roots(&self) -> (Vec<(Rat, u32)>, UPoly<Rat>) {
        if self.is_zero() {
            return (Vec::new(), self.clone());
        }
        let mut rest = self.clone();
        let mut roots = Vec::new();
        let zero_mult = rest.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            rest = UPoly::new(rest.coeffs[zero_mult..].to_vec());
            roots.push((Rat::zero(), zero_mult as u32));
        }
        if rest.degree().unwrap_or(0) == 0 {
            return (roots, rest);
        }
        let ints = integer_coefficients(&rest);
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let mut candidates = Vec::new();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                let r = Rat::new(p.clone(), q);
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        for r in candidates {
            let lin = UPoly::linear_root(r.clone());
            let mut mult = 0;
            while rest.degree().unwrap_or(0) > 0 && rest.eval(&r).is_zero() {
                rest = rest.div_rem(&lin).0;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, rest)
    }
}

/// Scales to primitive-ish integer coefficients (common denominator cleared).
fn integer_coefficients(p: &UPoly<Rat>) -> Vec<BigInt> {
    let l = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

impl<C: Coefficient + Signed> UPoly<C> {
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (k, c)) in self.coeffs.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).enumerate() {
            match (i, c.is_negative()) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            let a = c.abs();
            match k {
                0 => s.push_str(&a.to_string()),
                _ => {
                    if !a.is_one() {
                        s.push_str(&format!("{a}*"));
                    }
                    s.push_str(var);
                    if k > 1 {
                        s.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        s
    }
}

impl<C: Coefficient + Signed> fmt::Display for UPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("s"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn up(c: &[i64]) -> UPoly<Rat> {
        UPoly::new(c.iter().map(|&n| q(n, 1)).collect())
    }

    #[test]
    fn roots_of_cubic() {
        // (s - 1)^2 (2s + 3) = 2s^3 - s^2 - 4s + 3
        let p = up(&[3, -4, -1, 2]);
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![(q(-3, 2), 1), (q(1, 1), 2)]);
        assert_eq!(rest.degree(), Some(0));
    }

    #[test]
    fn irrational_residual() {
        // s (s^2 - 2)
        let (roots, rest) = up(&[0, -2, 0, 1]).rational_roots();
        assert_eq!(roots, vec![(q(0, 1), 1)]);
        assert_eq!(rest, up(&[-2, 0, 1]));
    }

    #[test]
    fn gcd_is_monic() {
        let a = up(&[0, 0, 2]);
        let b = up(&[0, 0, 0, 3]);
        assert_eq!(a.gcd(&b), up(&[0, 0, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(up(&[-2, 0, 1]).display_in("s"), "s^2 - 2");
    }
}
