//! Complex-time leaf tracing, conservation of first integrals along traced
//! leaves, and pointwise evaluation of the explicit conjugacy between the
//! blown-up foliations.

mod conjugacy;

pub use conjugacy::{
    conjugacy_identity_residuals, eval_conjugacy, evaluate_grid, expm1, Branch, ConjugacyEval, ConjugacyGrid, GridRow,
    Residuals, SERIES_THRESHOLD,
};

use num_complex::Complex;
use num_traits::{Float, ToPrimitive};

use crate::algebra::Coefficient;
use crate::error::{Error, Result};
use crate::foliation::{DarbouxFunction, VectorField};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_ESCAPE_RADIUS: f64 = 2.0;
pub const DEFAULT_DRIFT_TOLERANCE: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-2;
/// Denominators below this modulus stop a drift measurement.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;

fn lit<T: Float>(x: f64) -> T {
    T::from(x).expect("float literal")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig<T> {
    pub step: T,
    pub n_steps: usize,
    pub escape_radius: T,
}

impl<T: Float> TraceConfig<T> {
    pub fn new(step: T, n_steps: usize) -> Self {
        TraceConfig { step, n_steps, escape_radius: lit(DEFAULT_ESCAPE_RADIUS) }
    }
}

impl<T: Float> Default for TraceConfig<T> {
    fn default() -> Self {
        Self::new(lit(DEFAULT_STEP), 1000)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub tau: Complex<T>,
    pub state: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafTrajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub step: T,
    pub direction: Complex<T>,
    /// The state left the escape polydisc; samples stop before that step.
    pub escaped: bool,
}

impl<T: Float> LeafTrajectory<T> {
    pub fn start(&self) -> &[Complex<T>] {
        &self.samples[0].state
    }

    pub fn end(&self) -> &[Complex<T>] {
        &self.samples.last().expect("at least the start sample").state
    }

    /// `min_n |state_n[i]|`
    pub fn min_modulus(&self, i: usize) -> T {
        self.samples.iter().map(|s| s.state[i].norm()).fold(T::infinity(), T::min)
    }
}

/// A vector field with its coefficients converted to complex floats once.
struct ComplexField<T> {
    components: Vec<Vec<(Vec<u32>, Complex<T>)>>,
}

impl<T: Float> ComplexField<T> {
    fn new<C: Coefficient + ToPrimitive>(v: &VectorField<C>) -> Self {
        let components = v
            .components()
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| {
                        (m.exps().to_vec(), Complex::new(T::from(c.to_f64().unwrap_or(f64::NAN)).unwrap(), T::zero()))
                    })
                    .collect()
            })
            .collect();
        ComplexField { components }
    }

    fn eval(&self, point: &[Complex<T>]) -> Vec<Complex<T>> {
        self.components
            .iter()
            .map(|terms| {
                terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (e, c)| {
                    acc + e.iter().zip(point).fold(*c, |m, (&k, z)| m * z.powu(k))
                })
            })
            .collect()
    }
}

fn axpy<T: Float>(y: &[Complex<T>], a: Complex<T>, x: &[Complex<T>]) -> Vec<Complex<T>> {
    y.iter().zip(x).map(|(yi, xi)| *yi + a * *xi).collect()
}

fn sup_norm<T: Float>(z: &[Complex<T>]) -> T {
    z.iter().map(|c| c.norm()).fold(T::zero(), T::max)
}

/// Fixed-step RK4 for `dw/dτ = v(w)` along the ray `τ = s·direction`, `s ≥ 0`.
// negated comparisons treat NaN as out of range
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn trace_leaf<C, T>(
    v: &VectorField<C>,
    start: &[Complex<T>],
    direction: Complex<T>,
    config: &TraceConfig<T>,
) -> Result<LeafTrajectory<T>>
where
    C: Coefficient + ToPrimitive,
    T: Float,
{
    if start.len() != v.dim() {
        return Err(Error::Structure(format!("start has {} coordinates, field has {}", start.len(), v.dim())));
    }
    if !(config.step > T::zero() && config.step <= lit(MAX_STEP)) {
        return Err(Error::Precondition(format!("step must lie in (0, {MAX_STEP}]")));
    }
    if config.n_steps == 0 {
        return Err(Error::Precondition("n_steps must be positive".into()));
    }
    let unit_tol = lit::<T>(1e-12).max(T::epsilon() * lit(8.0));
    if (direction.norm() - T::one()).abs() > unit_tol {
        return Err(Error::Precondition("direction must have modulus 1".into()));
    }
    if start.iter().any(|c| !(c.norm() < T::one())) {
        return Err(Error::Precondition("start must lie in the open unit polydisc".into()));
    }
    let field = ComplexField::new(v);
    let h = direction * config.step;
    let half = h * lit::<T>(0.5);
    let sixth = h / lit::<T>(6.0);
    let two = Complex::new(lit::<T>(2.0), T::zero());

    let mut samples = Vec::with_capacity(config.n_steps + 1);
    samples.push(Sample { tau: Complex::new(T::zero(), T::zero()), state: start.to_vec() });
    let mut w = start.to_vec();
    let mut escaped = false;
    for n in 1..=config.n_steps {
        let k1 = field.eval(&w);
        let k2 = field.eval(&axpy(&w, half, &k1));
        let k3 = field.eval(&axpy(&w, half, &k2));
        let k4 = field.eval(&axpy(&w, h, &k3));
        let next: Vec<_> = (0..w.len()).map(|i| w[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect();
        if !(sup_norm(&next) <= config.escape_radius) {
            escaped = true;
            break;
        }
        w = next;
        samples.push(Sample { tau: h * T::from(n).unwrap(), state: w.clone() });
    }
    Ok(LeafTrajectory { samples, step: config.step, direction, escaped })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport<T> {
    /// `max_n |d(w_n) − d(w_0)| / max(|d(w_0)|, 1e-30)` over the evaluated samples.
    pub max_relative_drift: T,
    pub values: Vec<Complex<T>>,
    /// First sample where a denominator fell below the floor; evaluation stops there.
    pub warning_index: Option<usize>,
}

pub fn conservation_drift<C, T>(traj: &LeafTrajectory<T>, d: &DarbouxFunction<C>) -> Result<DriftReport<T>>
where
    C: Coefficient + ToPrimitive,
    T: Float,
{
    let floor = lit::<T>(DENOMINATOR_FLOOR);
    let d0 = d
        .eval_complex(traj.start(), floor)
        .ok_or_else(|| Error::Domain("denominator vanishes at the start of the trajectory".into()))?;
    let scale = d0.norm().max(lit(1e-30));
    let mut values = vec![d0];
    let mut worst = T::zero();
    let mut warning_index = None;
    for (n, s) in traj.samples.iter().enumerate().skip(1) {
        match d.eval_complex(&s.state, floor) {
            Some(val) => {
                worst = worst.max((val - d0).norm() / scale);
                values.push(val);
            }
            None => {
                warning_index = Some(n);
                break;
            }
        }
    }
    Ok(DriftReport { max_relative_drift: worst, values, warning_index })
}
