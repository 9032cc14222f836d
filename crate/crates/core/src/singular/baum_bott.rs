use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::eigen::{to_f64, Eigenvalue};
use crate::error::{Error, Result};
use crate::{Rat, C64};

const RELATIVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum IndexValue {
    Exact(Rat),
    Approximate(C64),
}

impl IndexValue {
    pub fn to_complex(&self) -> C64 {
        match self {
            IndexValue::Exact(r) => C64::new(to_f64(r), 0.0),
            IndexValue::Approximate(z) => *z,
        }
    }

    fn add(&self, other: &IndexValue) -> IndexValue {
        match (self, other) {
            (IndexValue::Exact(a), IndexValue::Exact(b)) => IndexValue::Exact(a + b),
            _ => IndexValue::Approximate(self.to_complex() + other.to_complex()),
        }
    }

    /// Equality with an exact target: exact comparison, or relative tolerance.
    pub fn matches(&self, target: &Rat) -> bool {
        match self {
            IndexValue::Exact(r) => r == target,
            IndexValue::Approximate(z) => {
                let t = to_f64(target);
                (z - C64::new(t, 0.0)).norm() <= RELATIVE_TOL * t.abs().max(1.0)
            }
        }
    }

    /// `Some(self ≥ bound)` when decidable (approximate values must be real).
    fn at_least(&self, bound: &Rat) -> Option<bool> {
        match self {
            IndexValue::Exact(r) => Some(r >= bound),
            IndexValue::Approximate(z) => {
                let t = to_f64(bound);
                (z.im.abs() <= RELATIVE_TOL * z.norm().max(1.0)).then_some(z.re >= t - RELATIVE_TOL * t.abs().max(1.0))
            }
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Exact(r) => write!(f, "{r}"),
            IndexValue::Approximate(z) => write!(f, "~{}{:+}i", z.re, z.im),
        }
    }
}

/// `λ₁/λ₂ + λ₂/λ₁ + 2 = (λ₁ + λ₂)² / (λ₁ λ₂)`.
pub fn baum_bott(l1: &Eigenvalue, l2: &Eigenvalue) -> Result<IndexValue> {
    if l1.is_zero() || l2.is_zero() {
        return Err(Error::Domain("Baum-Bott index needs two nonzero eigenvalues".into()));
    }
    match (l1, l2) {
        (Eigenvalue::Rational(a), Eigenvalue::Rational(b)) => {
            let s = a + b;
            Ok(IndexValue::Exact(&s * &s / (a * b)))
        }
        (Eigenvalue::Quadratic { a: a1, b: b1, d: d1 }, Eigenvalue::Quadratic { a: a2, b: b2, d: d2 })
            if a1 == a2 && d1 == d2 && *b1 == -b2.clone() =>
        {
            // conjugate pair: trace² / det, both rational
            let trace = a1 + a2;
            let det = a1 * a1 - b1 * b1 * Rat::from_integer(d1.clone());
            Ok(IndexValue::Exact(&trace * &trace / det))
        }
        _ => {
            let (a, b) = (l1.to_complex(), l2.to_complex());
            Ok(IndexValue::Approximate(a / b + b / a + 2.0))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub label: String,
    pub first: Eigenvalue,
    pub second: Eigenvalue,
}

/// Nondegenerate singular points of a degree-`k` foliation on the projective
/// plane, with their eigenvalue pairs and the running index sum.
#[derive(Clone, Debug, PartialEq)]
pub struct BaumBottLedger {
    degree: u32,
    entries: Vec<LedgerEntry>,
    indices: Vec<IndexValue>,
    sum: IndexValue,
}

impl BaumBottLedger {
    pub fn new(degree: u32, entries: Vec<LedgerEntry>) -> Result<Self> {
        let indices = entries
            .iter()
            .map(|e| {
                baum_bott(&e.first, &e.second)
                    .map_err(|_| Error::Domain(format!("entry `{}` has a zero eigenvalue", e.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = indices.iter().fold(IndexValue::Exact(Rat::zero()), |acc, v| acc.add(v));
        Ok(BaumBottLedger { degree, entries, indices, sum })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn indices(&self) -> &[IndexValue] {
        &self.indices
    }

    pub fn sum(&self) -> &IndexValue {
        &self.sum
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalIndexReport {
    pub degree: u32,
    /// `1 + k + k²`
    pub expected_count: BigInt,
    pub count: usize,
    pub count_ok: bool,
    /// `(k + 2)²`
    pub expected_sum: Rat,
    pub sum: IndexValue,
    pub sum_ok: bool,
    /// Every index is ≥ 4; `None` if some approximate index is not real.
    pub all_at_least_four: Option<bool>,
    /// `4(1 + k + k²)`
    pub lower_bound: Rat,
    /// `4(1 + k + k²) − (k + 2)²`, which is `3k²`.
    pub bound_gap: Rat,
    /// All indices ≥ 4 yet the lower bound exceeds `(k + 2)²`.
    pub bound_contradiction: bool,
}

impl GlobalIndexReport {
    pub fn is_consistent(&self) -> bool {
        self.count_ok && self.sum_ok && !self.bound_contradiction
    }
}

pub fn baum_bott_global_check(ledger: &BaumBottLedger) -> GlobalIndexReport {
    let k = BigInt::from(ledger.degree);
    let expected_count = BigInt::from(1) + &k + &k * &k;
    let kk = &k + BigInt::from(2);
    let expected_sum = Rat::from_integer(&kk * &kk);
    let lower_bound = Rat::from_integer(BigInt::from(4) * &expected_count);
    let four = Rat::from_integer(4.into());
    let all_at_least_four = ledger
        .indices
        .iter()
        .map(|v| v.at_least(&four))
        .collect::<Option<Vec<bool>>>()
        .map(|v| v.into_iter().all(|b| b));
    let bound_gap = &lower_bound - &expected_sum;
    GlobalIndexReport {
        degree: ledger.degree,
        count_ok: BigInt::from(ledger.entries.len()) == expected_count,
        expected_count,
        count: ledger.entries.len(),
        sum_ok: ledger.sum.matches(&expected_sum),
        sum: ledger.sum.clone(),
        bound_contradiction: all_at_least_four == Some(true) && bound_gap.is_positive(),
        all_at_least_four,
        expected_sum,
        lower_bound,
        bound_gap,
    }
}
