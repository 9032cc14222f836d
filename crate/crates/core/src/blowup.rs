//! Blow-up charts with monomial bindings, pullback of functions and vector
//! fields, and saturation by the exceptional divisor.

use crate::algebra::{Bindings, Coefficient, MPoly, Monomial, RationalFunction, VarSet};
use crate::error::{Error, Result};
use crate::foliation::{DarbouxFunction, VectorField};

/// An affine chart `π: target → source` of a blow-up, given by one monomial
/// per source variable. The exceptional divisor is `{exceptional = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupChart<C: Coefficient> {
    name: String,
    source: VarSet,
    target: VarSet,
    binding: Vec<MPoly<C>>,
    exceptional: usize,
}

impl<C: Coefficient> BlowupChart<C> {
    pub fn new(name: impl Into<String>, source: VarSet, binding: Vec<MPoly<C>>, exceptional: &str) -> Result<Self> {
        let target = binding
            .first()
            .map(|b| b.vars().clone())
            .ok_or_else(|| Error::Structure("chart without bindings".into()))?;
        if binding.len() != source.len() || target.len() != source.len() {
            return Err(Error::Structure("chart must map between spaces of equal dimension".into()));
        }
        for b in &binding {
            b.vars().check_same(&target)?;
            let ok = b.is_monomial() && b.leading_term().is_some_and(|(m, c)| c.is_one() && m.degree() <= 2);
            if !ok {
                return Err(Error::Structure(format!("chart binding `{b:?}` is not a monomial of degree <= 2")));
            }
        }
        let exceptional = target.require(exceptional)?;
        let chart = BlowupChart { name: name.into(), source, target, binding, exceptional };
        let det = determinant(&chart.jacobian());
        if !det.is_monomial() {
            return Err(Error::Structure("chart Jacobian determinant is not a monomial".into()));
        }
        Ok(chart)
    }

    fn from_parts(name: &str, target: [&str; 3], binds: [&[&str]; 3], exceptional: &str) -> Self {
        let target = VarSet::new(target).unwrap();
        let binding = binds
            .iter()
            .map(|factors| {
                factors.iter().fold(MPoly::one(target.clone()), |acc, f| &acc * &MPoly::var(target.clone(), f).unwrap())
            })
            .collect();
        Self::new(name, VarSet::xyz(), binding, exceptional).expect("built-in chart is valid")
    }

    /// Blow-up along the z-axis, `(x, t, z) ↦ (x, t x, z)`, divisor `{x = 0}`.
    pub fn z_axis_xtz() -> Self {
        Self::from_parts("z-axis-xtz", ["x", "t", "z"], [&["x"], &["t", "x"], &["z"]], "x")
    }

    /// Blow-up along the z-axis, `(u, y, z) ↦ (u y, y, z)`, divisor `{y = 0}`.
    pub fn z_axis_uyz() -> Self {
        Self::from_parts("z-axis-uyz", ["u", "y", "z"], [&["u", "y"], &["y"], &["z"]], "y")
    }

    /// Punctual blow-up at the origin, `(u, v, z) ↦ (u z, v z, z)`, divisor `{z = 0}`.
    pub fn origin_uvz() -> Self {
        Self::from_parts("origin-uvz", ["u", "v", "z"], [&["u", "z"], &["v", "z"], &["z"]], "z")
    }

    /// Punctual blow-up at the origin, `(x, v, w) ↦ (x, v x, w x)`, divisor `{x = 0}`.
    pub fn origin_xvw() -> Self {
        Self::from_parts("origin-xvw", ["x", "v", "w"], [&["x"], &["v", "x"], &["w", "x"]], "x")
    }

    /// Punctual blow-up at the origin, `(u, y, w) ↦ (u y, y, w y)`, divisor `{y = 0}`.
    pub fn origin_uyw() -> Self {
        Self::from_parts("origin-uyw", ["u", "y", "w"], [&["u", "y"], &["y"], &["w", "y"]], "y")
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["z-axis-xtz", "z-axis-uyz", "origin-uvz", "origin-xvw", "origin-uyw"]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "z-axis-xtz" => Some(Self::z_axis_xtz()),
            "z-axis-uyz" => Some(Self::z_axis_uyz()),
            "origin-uvz" => Some(Self::origin_uvz()),
            "origin-xvw" => Some(Self::origin_xvw()),
            "origin-uyw" => Some(Self::origin_uyw()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &VarSet {
        &self.source
    }

    pub fn target(&self) -> &VarSet {
        &self.target
    }

    pub fn binding(&self) -> &[MPoly<C>] {
        &self.binding
    }

    pub fn exceptional_index(&self) -> usize {
        self.exceptional
    }

    pub fn exceptional_var(&self) -> &str {
        self.target.name(self.exceptional)
    }

    pub fn bindings(&self) -> Bindings<C> {
        self.source
            .names()
            .iter()
            .cloned()
            .zip(self.binding.iter().map(|b| RationalFunction::from_poly(b.clone())))
            .collect()
    }

    /// `J[i][j] = ∂ binding_i / ∂ target_j`.
    pub fn jacobian(&self) -> Vec<Vec<MPoly<C>>> {
        self.binding.iter().map(|b| (0..self.target.len()).map(|j| b.partial_at(j)).collect()).collect()
    }
}

/// Polynomial pulled back through a chart, split as `e^k · reduced`.
pub fn pullback_polynomial<C: Coefficient>(c: &BlowupChart<C>, p: &MPoly<C>) -> Result<(u32, MPoly<C>)> {
    p.vars().check_same(c.source())?;
    let q = p.compose(c.binding())?;
    q.divide_out_at(c.exceptional)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionPullback<C: Coefficient> {
    /// The plain composite `d ∘ π`.
    pub pulled: DarbouxFunction<C>,
    /// Exponent of the exceptional variable in the prefactor (negative when it
    /// sits in the denominator).
    pub multiplicity: i32,
    pub reduced: DarbouxFunction<C>,
}

/// `d ∘ π = e^k · reduced` where `e` divides neither numerator nor
/// denominator of the reduced prefactor.
pub fn pullback_function<C: Coefficient>(c: &BlowupChart<C>, d: &DarbouxFunction<C>) -> Result<FunctionPullback<C>> {
    d.vars().check_same(c.source())?;
    let b = c.bindings();
    let r = d.prefactor().substitute(&b)?;
    let s = d.exponent().substitute(&b)?;
    let (kn, n) = r.num().divide_out_at(c.exceptional)?;
    let (kd, dd) = r.den().divide_out_at(c.exceptional)?;
    let reduced = DarbouxFunction::new(RationalFunction::new(n, dd)?, s.clone())?;
    let pulled = DarbouxFunction::new(r, s)?;
    Ok(FunctionPullback { pulled, multiplicity: kn as i32 - kd as i32, reduced })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldPullback<C: Coefficient> {
    /// Power of the exceptional variable divided out of the transported field.
    pub multiplicity: i32,
    pub field: VectorField<C>,
    /// Monomial in the non-exceptional variables the field was multiplied by
    /// to stay polynomial; `1` for the built-in charts.
    pub cleared: Monomial,
}

/// Transports `v` through the chart with the inverse-Jacobian chain rule and
/// saturates by the exceptional variable: `π^* v = e^m · field / cleared`.
pub fn pullback_vector_field<C: Coefficient>(c: &BlowupChart<C>, v: &VectorField<C>) -> Result<FieldPullback<C>> {
    v.vars().check_same(c.source())?;
    let jac = c.jacobian();
    let det = determinant(&jac);
    let adj = adjugate(&jac);
    let pulled: Vec<MPoly<C>> = v.components().iter().map(|a| a.compose(c.binding())).collect::<Result<_>>()?;
    let n = c.target().len();
    let mut numer: Vec<MPoly<C>> = (0..n)
        .map(|i| (0..n).fold(MPoly::zero(c.target().clone()), |acc, j| &acc + &(&adj[i][j] * &pulled[j])))
        .collect();
    let content = numer
        .iter()
        .filter_map(MPoly::monomial_content)
        .reduce(|a, b| a.gcd(&b))
        .ok_or_else(|| Error::Structure("transported field vanishes identically".into()))?;
    let (det_mono, det_coeff) = det.leading_term().map(|(m, k)| (m.clone(), k.clone())).unwrap();
    let e = c.exceptional;
    let multiplicity = content.exps()[e] as i32 - det_mono.exps()[e] as i32;

    let mut strip = vec![0u32; n];
    strip[e] = content.exps()[e];
    let mut rest_det = det_mono.exps().to_vec();
    rest_det[e] = 0;
    let rest_det = Monomial::new(rest_det);
    let mut rest_content = content.exps().to_vec();
    rest_content[e] = 0;
    let common = rest_det.gcd(&Monomial::new(rest_content));
    for (s, g) in strip.iter_mut().zip(common.exps()) {
        *s += g;
    }
    let strip = Monomial::new(strip);
    let cleared = rest_det.div(&common).unwrap();
    let inv = C::one() / det_coeff;
    for p in numer.iter_mut() {
        *p = p.div_monomial(&strip).expect("content divides").scale(&inv);
    }
    Ok(FieldPullback { multiplicity, field: VectorField::new(numer)?, cleared })
}

/// True iff the exceptional variable divides the field's component along it.
pub fn is_divisor_invariant<C: Coefficient>(field: &VectorField<C>, c: &BlowupChart<C>) -> Result<bool> {
    field.vars().check_same(c.target())?;
    let comp = field.component(c.exceptional);
    Ok(comp.is_zero() || comp.min_exponent(c.exceptional).is_some_and(|k| k >= 1))
}

/// Transports `v` through an arbitrary rational change of coordinates
/// `source = map(target)` (one rational function per source variable):
/// returns `W` with `J_map · W = v ∘ map`.
pub fn transport_rational<C: Coefficient>(
    v: &VectorField<C>,
    map: &[RationalFunction<C>],
) -> Result<Vec<RationalFunction<C>>> {
    if map.len() != v.dim() {
        return Err(Error::Structure("map arity does not match the field".into()));
    }
    let target = map[0].vars().clone();
    let jac: Vec<Vec<RationalFunction<C>>> =
        map.iter().map(|b| (0..target.len()).map(|j| b.partial_at(j)).collect()).collect();
    let det = determinant(&jac);
    if det.is_zero() {
        return Err(Error::Domain("coordinate change is degenerate".into()));
    }
    let adj = adjugate(&jac);
    let pulled: Vec<_> =
        v.components().iter().map(|a| RationalFunction::from_poly(a.clone()).compose(map)).collect::<Result<_>>()?;
    (0..target.len())
        .map(|i| {
            let mut acc = RationalFunction::zero(target.clone());
            for j in 0..target.len() {
                acc = acc.try_add(&adj[i][j].try_mul(&pulled[j])?)?;
            }
            acc.try_div(&det)
        })
        .collect()
}

/// If `w = μ · v` componentwise with `μ` a ratio of monomials, returns `μ`.
pub fn monomial_proportionality<C: Coefficient>(
    w: &[RationalFunction<C>],
    v: &VectorField<C>,
) -> Option<RationalFunction<C>> {
    if w.len() != v.dim() {
        return None;
    }
    let k = v.components().iter().position(|c| !c.is_zero())?;
    let mu = w[k].try_div(&RationalFunction::from_poly(v.component(k).clone())).ok()?;
    if !(mu.num().is_monomial() && mu.den().is_monomial()) {
        return None;
    }
    let agrees = w
        .iter()
        .zip(v.components())
        .all(|(wi, vi)| mu.try_mul(&RationalFunction::from_poly(vi.clone())).ok().as_ref() == Some(wi));
    agrees.then_some(mu)
}

trait RingElem: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
}

impl<C: Coefficient> RingElem for MPoly<C> {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl<C: Coefficient> RingElem for RationalFunction<C> {
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("same variables")
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("same variables")
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("same variables")
    }
    fn negate(&self) -> Self {
        self.neg()
    }
}

fn minor<T: Clone>(m: &[Vec<T>], row: usize, col: usize) -> Vec<Vec<T>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Laplace expansion along the first row; matrices here are at most 3×3.
fn determinant<T: RingElem>(m: &[Vec<T>]) -> T {
    match m.len() {
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        n => {
            let mut acc = m[0][0].mul(&determinant(&minor(m, 0, 0)));
            for j in 1..n {
                let term = m[0][j].mul(&determinant(&minor(m, 0, j)));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn adjugate<T: RingElem>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = m.len();
    if n == 1 {
        // adj of a 1×1 matrix is [1]; only reachable for 1-dimensional charts.
        let one = m[0][0].sub(&m[0][0]);
        return vec![vec![one]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = determinant(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        c.negate()
                    }
                })
                .collect()
        })
        .collect()
}
