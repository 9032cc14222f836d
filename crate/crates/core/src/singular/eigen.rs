use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Rat, UPoly, C64};

/// An eigenvalue, exact whenever the characteristic polynomial allows it.
#[derive(Clone, Debug, PartialEq)]
pub enum Eigenvalue {
    Rational(Rat),
    /// `a + b·√d` with `d` a squarefree integer other than 0, 1 and `b ≠ 0`.
    Quadratic {
        a: Rat,
        b: Rat,
        d: BigInt,
    },
    /// Floating approximation of a root of an irreducible factor of degree ≥ 3.
    Approximate(C64),
}

impl Eigenvalue {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Eigenvalue::Approximate(_))
    }

    /// Exact zero test; approximate values are never reported as zero since
    /// zero roots are always extracted exactly.
    pub fn is_zero(&self) -> bool {
        match self {
            Eigenvalue::Rational(r) => r.is_zero(),
            Eigenvalue::Quadratic { .. } => false,
            Eigenvalue::Approximate(z) => z.norm() == 0.0,
        }
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Eigenvalue::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> C64 {
        match self {
            Eigenvalue::Rational(r) => C64::new(to_f64(r), 0.0),
            Eigenvalue::Quadratic { a, b, d } => {
                let df = d.to_f64().unwrap_or(f64::NAN);
                let (a, b) = (to_f64(a), to_f64(b));
                if df >= 0.0 {
                    C64::new(a + b * df.sqrt(), 0.0)
                } else {
                    C64::new(a, b * (-df).sqrt())
                }
            }
            Eigenvalue::Approximate(z) => *z,
        }
    }

    pub(crate) fn sort_key_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.to_complex(), other.to_complex());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Rational(r) => write!(f, "{r}"),
            Eigenvalue::Quadratic { a, b, d } => {
                let sign = if b.is_negative() { "-" } else { "+" };
                let mag = b.abs();
                let coeff = if mag.is_one() { String::new() } else { format!("{mag}*") };
                if a.is_zero() {
                    write!(f, "{}{coeff}sqrt({d})", if b.is_negative() { "-" } else { "" })
                } else {
                    write!(f, "{a} {sign} {coeff}sqrt({d})")
                }
            }
            Eigenvalue::Approximate(z) => write!(f, "~{}{:+}i", z.re, z.im),
        }
    }
}

pub(crate) fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `det(λ I − A)` by Faddeev–LeVerrier, coefficients low to high.
pub fn characteristic_polynomial(a: &[Vec<Rat>]) -> UPoly<Rat> {
    let n = a.len();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut m = vec![vec![Rat::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let tr: Rat = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -tr / Rat::from_integer(BigInt::from(k));
    }
    UPoly::new(coeffs)
}

fn matmul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

/// All roots of `p` with multiplicity: rational roots exactly, a leftover
/// quadratic exactly over its splitting field, anything else numerically.
pub fn roots(p: &UPoly<Rat>) -> Vec<Eigenvalue> {
    let (rational, rest) = p.rational_roots();
    let mut out: Vec<Eigenvalue> =
        rational.into_iter().flat_map(|(r, m)| std::iter::repeat_n(Eigenvalue::Rational(r), m as usize)).collect();
    match rest.degree() {
        None | Some(0) => {}
        Some(2) => out.extend(quadratic_roots(&rest)),
        Some(_) => out.extend(numeric_roots(&rest).into_iter().map(Eigenvalue::Approximate)),
    }
    out.sort_by(Eigenvalue::sort_key_cmp);
    out
}

/// Roots of an irreducible quadratic over Q, as `a ± b√d` with `d` squarefree.
fn quadratic_roots(q: &UPoly<Rat>) -> [Eigenvalue; 2] {
    let m = q.monic();
    let p1 = &m.coeffs()[1];
    let p0 = &m.coeffs()[0];
    let two = Rat::from_integer(2.into());
    let a = -p1 / &two;
    let disc = &a * &a - p0;
    // √(n/m) = √(n m) / m, then pull squares out of n m.
    let nm = disc.numer() * disc.denom();
    let (outside, d) = squarefree_split(&nm);
    let b = Rat::new(outside, disc.denom().clone());
    [Eigenvalue::Quadratic { a: a.clone(), b: b.clone(), d: d.clone() }, Eigenvalue::Quadratic { a, b: -b, d }]
}

/// Writes `n = s² · d` with `d` squarefree (sign kept in `d`).
fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut rest = n.abs();
    let mut outside = BigInt::one();
    let mut f = BigInt::from(2);
    while &f * &f <= rest {
        let sq = &f * &f;
        while rest.is_multiple_of(&sq) {
            rest /= &sq;
            outside *= &f;
        }
        f += 1;
    }
    (outside, sign * rest)
}

/// Durand–Kerner iteration followed by Newton polishing.
fn numeric_roots(p: &UPoly<Rat>) -> Vec<C64> {
    let m = p.monic();
    let coeffs: Vec<C64> = m.coeffs().iter().map(|c| C64::new(to_f64(c), 0.0)).collect();
    let n = coeffs.len() - 1;
    let eval = |z: C64| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let deriv: Vec<C64> = coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let eval_d = |z: C64| deriv.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / d;
        }
    }
    z
}

/// `|p(λ)| / max |coeff|`, the scale-free residual of an approximate root.
pub fn relative_residual(p: &UPoly<Rat>, root: C64) -> f64 {
    let coeffs: Vec<C64> = p.coeffs().iter().map(|c| C64::new(to_f64(c), 0.0)).collect();
    let value = coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * root + c);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    value.norm() / scale.max(f64::MIN_POSITIVE)
}
