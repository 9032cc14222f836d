//! Existence of dicritical invariant surfaces for a foliation with two
//! independent holomorphic first integrals, decided from the exponents of
//! their irreducible factors.
//!
//! Write `F = Π h_i^{k_i} Π f_j^{α_j}` and `G = Π h_i^{l_i} Π g_m^{β_m}` with
//! the common factors `h_i` ordered by `k_i/l_i`. The verdict depends only on
//! how many of the consecutive ratios are strictly increasing and on whether
//! `F`, `G` carry private factors.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::{QPoly, QRational, Rat};

#[derive(Clone, Debug, PartialEq)]
pub struct CommonFactor {
    pub factor: QPoly,
    /// exponent in `F`
    pub k: u32,
    /// exponent in `G`
    pub l: u32,
}

impl CommonFactor {
    pub fn ratio(&self) -> Rat {
        Rat::new(self.k.into(), self.l.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrivateFactor {
    pub factor: QPoly,
    pub exponent: u32,
}

/// Two first integrals given by their factorizations.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPair {
    common: Vec<CommonFactor>,
    only_f: Vec<PrivateFactor>,
    only_g: Vec<PrivateFactor>,
}

impl FactoredPair {
    pub fn new(common: Vec<CommonFactor>, only_f: Vec<PrivateFactor>, only_g: Vec<PrivateFactor>) -> Result<Self> {
        let all: Vec<&QPoly> = common
            .iter()
            .map(|c| &c.factor)
            .chain(only_f.iter().map(|f| &f.factor))
            .chain(only_g.iter().map(|g| &g.factor))
            .collect();
        let Some(first) = all.first() else {
            return Err(Error::Structure("factored pair has no factors".into()));
        };
        for (n, p) in all.iter().enumerate() {
            p.vars().check_same(first.vars())?;
            if p.is_constant() {
                return Err(Error::Structure(format!("factor #{n} is a constant")));
            }
            if all[..n].iter().any(|q| q.is_proportional(p)) {
                return Err(Error::Structure(format!("factor {p} is listed twice (up to a constant)")));
            }
        }
        if common.iter().any(|c| c.k == 0 || c.l == 0) || only_f.iter().chain(&only_g).any(|f| f.exponent == 0) {
            return Err(Error::Structure("exponents must be positive".into()));
        }
        let (p, q, r) = (common.len(), only_f.len(), only_g.len());
        if p + q == 0 || p + r == 0 {
            return Err(Error::Structure("both integrals must be non-constant".into()));
        }
        if q == 0 && r == 0 && p < 2 {
            return Err(Error::Structure("with no private factors F and G would be dependent".into()));
        }
        Ok(FactoredPair { common, only_f, only_g })
    }

    pub fn common(&self) -> &[CommonFactor] {
        &self.common
    }

    pub fn only_f(&self) -> &[PrivateFactor] {
        &self.only_f
    }

    pub fn only_g(&self) -> &[PrivateFactor] {
        &self.only_g
    }

    /// `(p, q, r)`: numbers of common, F-only and G-only factors.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.common.len(), self.only_f.len(), self.only_g.len())
    }

    pub fn f(&self) -> QPoly {
        product(self.common.iter().map(|c| (&c.factor, c.k)).chain(self.only_f.iter().map(|f| (&f.factor, f.exponent))))
    }

    pub fn g(&self) -> QPoly {
        product(self.common.iter().map(|c| (&c.factor, c.l)).chain(self.only_g.iter().map(|g| (&g.factor, g.exponent))))
    }

    /// Checks that the factorizations multiply out to `f` and `g` up to
    /// nonzero constants.
    pub fn check_products(&self, f: &QPoly, g: &QPoly) -> Result<()> {
        if !self.f().is_proportional(f) {
            return Err(Error::Structure(format!("factors of F multiply to {}, not {f}", self.f())));
        }
        if !self.g().is_proportional(g) {
            return Err(Error::Structure(format!("factors of G multiply to {}, not {g}", self.g())));
        }
        Ok(())
    }

    /// `F^n` in place of `F`.
    pub fn power_f(&self, n: u32) -> Self {
        let mut out = self.clone();
        out.common.iter_mut().for_each(|c| c.k *= n);
        out.only_f.iter_mut().for_each(|f| f.exponent *= n);
        out
    }

    /// `G^n` in place of `G`.
    pub fn power_g(&self, n: u32) -> Self {
        self.swapped().power_f(n).swapped()
    }

    /// The pair `(G, F)`.
    pub fn swapped(&self) -> Self {
        FactoredPair {
            common: self.common.iter().map(|c| CommonFactor { factor: c.factor.clone(), k: c.l, l: c.k }).collect(),
            only_f: self.only_g.clone(),
            only_g: self.only_f.clone(),
        }
    }
}

fn product<'a>(factors: impl Iterator<Item = (&'a QPoly, u32)>) -> QPoly {
    let mut it = factors.peekable();
    let vars = it.peek().map(|(p, _)| p.vars().clone()).expect("non-empty factor list");
    it.fold(QPoly::one(vars), |acc, (p, e)| &acc * &p.pow(e))
}

/// Sorts the common factors by `k_i/l_i`, ties by graded-lex order of `h_i`.
pub fn normalize_ordering(fp: &FactoredPair) -> FactoredPair {
    let mut out = fp.clone();
    out.common.sort_by(|a, b| a.ratio().cmp(&b.ratio()).then_with(|| a.factor.grlex_cmp(&b.factor)));
    out
}

/// Number of `i` with `k_i/l_i < k_{i+1}/l_{i+1}`.
pub fn count_strict_inequalities(fp: &FactoredPair) -> usize {
    fp.common.windows(2).filter(|w| w[0].ratio() < w[1].ratio()).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DicriticalCase {
    None,
    /// at least two strict inequalities
    Case1,
    /// exactly one strict inequality, some private factor
    Case2,
    /// all ratios equal
    Case3,
}

impl fmt::Display for DicriticalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DicriticalCase::None => "none",
            DicriticalCase::Case1 => "case1",
            DicriticalCase::Case2 => "case2",
            DicriticalCase::Case3 => "case3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    Constant,
    Holomorphic,
    MeromorphicNonHolomorphic,
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegralKind::Constant => "constant",
            IntegralKind::Holomorphic => "holomorphic",
            IntegralKind::MeromorphicNonHolomorphic => "meromorphic",
        })
    }
}

/// `F^{l_i} / G^{k_i}` with `h_i` cancelled, as factor lists with positive
/// exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionIntegral {
    /// Index into the normalized common factors.
    pub index: usize,
    pub surface: QPoly,
    pub numerator: Vec<(QPoly, u64)>,
    pub denominator: Vec<(QPoly, u64)>,
    pub kind: IntegralKind,
}

impl RestrictionIntegral {
    pub fn to_rational(&self) -> Result<QRational> {
        let vars = self.surface.vars().clone();
        let expand = |fs: &[(QPoly, u64)]| -> Result<QPoly> {
            fs.iter().try_fold(QPoly::one(vars.clone()), |acc, (p, e)| {
                let e = u32::try_from(*e).map_err(|_| Error::Domain("exponent too large to expand".into()))?;
                Ok(&acc * &p.pow(e))
            })
        };
        QRational::new(expand(&self.numerator)?, expand(&self.denominator)?)
    }
}

impl fmt::Display for RestrictionIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn block(f: &mut fmt::Formatter<'_>, fs: &[(QPoly, u64)]) -> fmt::Result {
            if fs.is_empty() {
                return f.write_str("1");
            }
            for (n, (p, e)) in fs.iter().enumerate() {
                if n > 0 {
                    f.write_str("*")?;
                }
                write!(f, "({p})")?;
                if *e != 1 {
                    write!(f, "^{e}")?;
                }
            }
            Ok(())
        }
        block(f, &self.numerator)?;
        if !self.denominator.is_empty() {
            f.write_str(" / ")?;
            block(f, &self.denominator)?;
        }
        Ok(())
    }
}

/// The quotient `F^{l_i} / G^{k_i}` for the `i`-th common factor of `fp`
/// (indexing `fp` as given).
pub fn restriction_integral(fp: &FactoredPair, i: usize) -> Result<RestrictionIntegral> {
    let hi = fp
        .common
        .get(i)
        .ok_or_else(|| Error::Precondition(format!("common factor index {i} out of range ({})", fp.common.len())))?;
    let (ki, li) = (i64::from(hi.k), i64::from(hi.l));
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    let mut push = |p: &QPoly, e: i64| match e.cmp(&0) {
        Ordering::Greater => numerator.push((p.clone(), e as u64)),
        Ordering::Less => denominator.push((p.clone(), e.unsigned_abs())),
        Ordering::Equal => {}
    };
    for (j, c) in fp.common.iter().enumerate() {
        if j != i {
            push(&c.factor, i64::from(c.k) * li - i64::from(c.l) * ki);
        }
    }
    for f in &fp.only_f {
        push(&f.factor, i64::from(f.exponent) * li);
    }
    for g in &fp.only_g {
        push(&g.factor, -i64::from(g.exponent) * ki);
    }
    let kind = match (numerator.is_empty(), denominator.is_empty()) {
        (true, true) => IntegralKind::Constant,
        (_, true) => IntegralKind::Holomorphic,
        _ => IntegralKind::MeromorphicNonHolomorphic,
    };
    Ok(RestrictionIntegral { index: i, surface: hi.factor.clone(), numerator, denominator, kind })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DicriticalVerdict {
    pub dicritical: bool,
    pub case: DicriticalCase,
    pub strict_inequalities: usize,
    pub witness: Option<RestrictionIntegral>,
}

/// Decides whether some `{h_i = 0}` is a dicritical invariant surface.
///
/// The pair is normalized first; witness indices refer to the normalized order.
pub fn classify(fp: &FactoredPair) -> Result<DicriticalVerdict> {
    let fp = normalize_ordering(fp);
    let (p, q, r) = fp.counts();
    let strict = count_strict_inequalities(&fp);
    if p >= 1 && strict == 0 && (q == 0 || r == 0) {
        return Err(Error::Precondition(format!(
            "not in simplified form: all ratios k_i/l_i are equal but (q, r) = ({q}, {r}); \
             divide out the common part so that F and G share no factor"
        )));
    }
    let chosen = match strict {
        0 if p >= 1 => Some((DicriticalCase::Case3, 0)),
        0 => None,
        1 if q + r >= 1 => {
            let upper = fp.common.windows(2).position(|w| w[0].ratio() < w[1].ratio()).expect("one strict step") + 1;
            Some((DicriticalCase::Case2, upper))
        }
        1 => None,
        _ => {
            let (lo, hi) = (fp.common[0].ratio(), fp.common[p - 1].ratio());
            let i = (1..p - 1)
                .find(|&i| {
                    let x = fp.common[i].ratio();
                    lo < x && x < hi
                })
                .expect("two strict steps leave an interior ratio");
            Some((DicriticalCase::Case1, i))
        }
    };
    Ok(match chosen {
        Some((case, i)) => DicriticalVerdict {
            dicritical: true,
            case,
            strict_inequalities: strict,
            witness: Some(restriction_integral(&fp, i)?),
        },
        None => DicriticalVerdict {
            dicritical: false,
            case: DicriticalCase::None,
            strict_inequalities: strict,
            witness: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::VarSet;

    fn v(name: &str) -> QPoly {
        QPoly::var(VarSet::xyz(), name).unwrap()
    }

    fn common(p: QPoly, k: u32, l: u32) -> CommonFactor {
        CommonFactor { factor: p, k, l }
    }

    fn private(p: QPoly, e: u32) -> PrivateFactor {
        PrivateFactor { factor: p, exponent: e }
    }

    #[test]
    fn ordering_and_counting() {
        let fp = FactoredPair::new(vec![common(v("z"), 2, 1), common(v("x"), 1, 1)], vec![], vec![]).unwrap();
        let n = normalize_ordering(&fp);
        assert_eq!(n.common()[0].factor, v("x"));
        assert_eq!(count_strict_inequalities(&n), 1);

        let fp = FactoredPair::new(vec![common(v("y"), 2, 4), common(v("x"), 1, 2)], vec![], vec![]).unwrap();
        let n = normalize_ordering(&fp);
        // tie at 1/2: graded-lex puts y below x
        assert_eq!(n.common()[0].factor, v("y"));
        assert_eq!(count_strict_inequalities(&n), 0);
    }

    #[test]
    fn rejects_bad_input() {
        let vars = VarSet::xyz();
        let one = QPoly::one(vars);
        assert!(FactoredPair::new(vec![common(one, 1, 1)], vec![private(v("x"), 1)], vec![private(v("y"), 1)]).is_err());
        assert!(FactoredPair::new(vec![common(v("z"), 1, 1)], vec![], vec![]).is_err());
        assert!(FactoredPair::new(
            vec![common(v("z"), 1, 1)],
            vec![private(&v("z") * &crate::QPoly::constant(VarSet::xyz(), crate::rat(3)), 1)],
            vec![private(v("y"), 1)]
        )
        .is_err());
        assert!(FactoredPair::new(vec![], vec![private(v("x"), 1)], vec![]).is_err());
    }

    #[test]
    fn simplified_form_precondition() {
        let fp = FactoredPair::new(vec![common(v("z"), 1, 1)], vec![private(v("x"), 1)], vec![]).unwrap();
        assert!(matches!(classify(&fp), Err(Error::Precondition(_))));
    }

    #[test]
    fn case1_picks_smallest_interior() {
        let fp =
            FactoredPair::new(vec![common(v("x"), 1, 1), common(v("y"), 2, 1), common(v("z"), 3, 1)], vec![], vec![])
                .unwrap();
        let r = classify(&fp).unwrap();
        assert_eq!(r.case, DicriticalCase::Case1);
        let w = r.witness.unwrap();
        assert_eq!(w.surface, v("y"));
        // F/G² = x^{-1} z
        assert_eq!(w.numerator, vec![(v("z"), 1)]);
        assert_eq!(w.denominator, vec![(v("x"), 1)]);
    }

    #[test]
    fn restriction_exponents() {
        let fp =
            FactoredPair::new(vec![common(v("z"), 2, 2)], vec![private(v("x"), 1)], vec![private(v("y"), 1)]).unwrap();
        let w = restriction_integral(&fp, 0).unwrap();
        assert_eq!(w.numerator, vec![(v("x"), 2)]);
        assert_eq!(w.denominator, vec![(v("y"), 2)]);
        assert_eq!(w.kind, IntegralKind::MeromorphicNonHolomorphic);
        assert!(restriction_integral(&fp, 1).is_err());
    }
}
