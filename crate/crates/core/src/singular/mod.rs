//! Singular points: exact location tests, linear parts and their spectra,
//! eigenvalue-ratio rationality, and Baum-Bott index bookkeeping.

mod baum_bott;
mod eigen;

pub use baum_bott::{baum_bott, baum_bott_global_check, BaumBottLedger, GlobalIndexReport, IndexValue, LedgerEntry};
pub use eigen::{characteristic_polynomial, relative_residual, roots, Eigenvalue};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::{QField, QUPoly, Rat, UPoly};

fn check_arity(v: &QField, point: &[Rat]) -> Result<()> {
    if point.len() != v.dim() {
        return Err(Error::Structure(format!("point has {} coordinates, field has {}", point.len(), v.dim())));
    }
    Ok(())
}

/// Exact test that every component vanishes at `point`.
pub fn is_singular_at(v: &QField, point: &[Rat]) -> Result<bool> {
    check_arity(v, point)?;
    Ok(v.components().iter().all(|c| c.eval(point).is_zero()))
}

/// Singular points of `v` along a polynomial curve `s ↦ (c_1(s), ..., c_n(s))`.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveLocus {
    /// Every point of the curve is singular.
    AllParameters,
    /// Distinct rational parameters, plus the monic factor carrying any
    /// non-rational common roots.
    Finite { roots: Vec<Rat>, residual: Option<QUPoly> },
}

pub fn singular_locus_on_curve(v: &QField, curve: &[QUPoly]) -> Result<CurveLocus> {
    if curve.len() != v.dim() {
        return Err(Error::Structure(format!("curve has {} coordinates, field has {}", curve.len(), v.dim())));
    }
    let mut g = UPoly::zero();
    for comp in v.components() {
        let mut restricted = UPoly::zero();
        for (m, c) in comp.terms() {
            let term = m.exps().iter().zip(curve).fold(UPoly::constant(c.clone()), |acc, (&e, ci)| acc.mul(&ci.pow(e)));
            restricted = restricted.add(&term);
        }
        g = g.gcd(&restricted);
    }
    if g.is_zero() {
        return Ok(CurveLocus::AllParameters);
    }
    let (rational, rest) = g.rational_roots();
    let roots = rational.into_iter().map(|(r, _)| r).collect();
    let residual = (rest.degree().unwrap_or(0) > 0).then(|| rest.monic());
    Ok(CurveLocus::Finite { roots, residual })
}

/// Linearization of a field at one of its singular points.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularReport {
    pub point: Vec<Rat>,
    /// `linear_part[i][j] = ∂_j(component_i)(point)`
    pub linear_part: Vec<Vec<Rat>>,
    pub characteristic_polynomial: QUPoly,
    /// Sorted by (real part, imaginary part).
    pub eigenvalues: Vec<Eigenvalue>,
    /// At least one eigenvalue is nonzero.
    pub simple: bool,
}

impl SingularReport {
    pub fn trace(&self) -> Rat {
        (0..self.linear_part.len()).map(|i| self.linear_part[i][i].clone()).sum()
    }

    /// `(-1)^n χ(0)`
    pub fn determinant(&self) -> Rat {
        let c0 = self.characteristic_polynomial.coeffs().first().cloned().unwrap_or_else(Rat::zero);
        if self.linear_part.len().is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }
}

pub fn linear_part(v: &QField, point: &[Rat]) -> Result<SingularReport> {
    if !is_singular_at(v, point)? {
        return Err(Error::Domain("linear part requested at a non-singular point".into()));
    }
    let n = v.dim();
    let jac: Vec<Vec<Rat>> =
        v.components().iter().map(|c| (0..n).map(|j| c.partial_at(j).eval(point)).collect()).collect();
    let chi = characteristic_polynomial(&jac);
    let eigenvalues = roots(&chi);
    let simple = eigenvalues.iter().any(|e| !e.is_zero());
    Ok(SingularReport { point: point.to_vec(), linear_part: jac, characteristic_polynomial: chi, eigenvalues, simple })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Exactly one of the pair is zero.
    MixedZero,
    /// Both nonzero and exact, with an irrational quotient.
    IrrationalRatio,
    /// An approximate eigenvalue is involved; rationality cannot be decided.
    UndecidableApproximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RatioViolation {
    pub first: usize,
    pub second: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioCheck {
    Ok,
    Violations(Vec<RatioViolation>),
}

impl RatioCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, RatioCheck::Ok)
    }
}

/// For every pair of eigenvalues: `λ = 0 ⇔ μ = 0`, and `λ/μ ∈ Q` when both are nonzero.
pub fn eigenvalue_ratio_rationality(report: &SingularReport) -> RatioCheck {
    let ev = &report.eigenvalues;
    let mut out = Vec::new();
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            if let Some(kind) = pair_violation(&ev[i], &ev[j]) {
                out.push(RatioViolation { first: i, second: j, kind });
            }
        }
    }
    if out.is_empty() {
        RatioCheck::Ok
    } else {
        RatioCheck::Violations(out)
    }
}

fn pair_violation(a: &Eigenvalue, b: &Eigenvalue) -> Option<ViolationKind> {
    use Eigenvalue::*;
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return None,
        (true, false) | (false, true) => return Some(ViolationKind::MixedZero),
        _ => {}
    }
    match (a, b) {
        (Approximate(_), _) | (_, Approximate(_)) => Some(ViolationKind::UndecidableApproximate),
        (Rational(_), Rational(_)) => None,
        (Rational(_), Quadratic { .. }) | (Quadratic { .. }, Rational(_)) => Some(ViolationKind::IrrationalRatio),
        (Quadratic { a: a1, b: b1, d: d1 }, Quadratic { a: a2, b: b2, d: d2 }) => {
            if d1 != d2 {
                return Some(ViolationKind::UndecidableApproximate);
            }
            // (a1 + b1√d)/(a2 + b2√d) = q  ⇔  a1 = q a2 and b1 = q b2
            if a1 * b2 == a2 * b1 {
                None
            } else {
                Some(ViolationKind::IrrationalRatio)
            }
        }
    }
}

/// For three nonzero rational eigenvalues: `Some(true)` when two share a sign
/// that is opposite to the sign of the third. Abstains otherwise.
pub fn saddle_sign_pattern(report: &SingularReport) -> Option<bool> {
    if report.eigenvalues.len() != 3 {
        return None;
    }
    let signs: Option<Vec<bool>> =
        report.eigenvalues.iter().map(|e| e.as_rational().filter(|r| !r.is_zero()).map(|r| r.is_positive())).collect();
    let positives = signs?.iter().filter(|&&p| p).count();
    Some(positives == 1 || positives == 2)
}
