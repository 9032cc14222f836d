use num_complex::Complex;
use num_traits::Float;

use super::lit;
use crate::error::{Error, Result};

/// Below this `|t²x|` the factor `w/(e^w − 1)` is summed as a series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Square-root branch used for `φ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `arg ∈ (−π/2, π/2]`
    Principal,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("principal")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugacyEval<T> {
    pub x: Complex<T>,
    pub t: Complex<T>,
    pub z: Complex<T>,
    pub phi1: Complex<T>,
    pub phi2: Complex<T>,
    pub phi3: Complex<T>,
    pub branch: Branch,
}

/// `e^w − 1` without cancellation near 0, as `2 e^{w/2} sinh(w/2)`.
pub fn expm1<T: Float>(w: Complex<T>) -> Complex<T> {
    let h = w * lit::<T>(0.5);
    h.exp() * h.sinh() * lit::<T>(2.0)
}

/// `w / (e^w − 1)`, equal to 1 at `w = 0`.
fn w_over_expm1<T: Float>(w: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    if w.norm() < lit(SERIES_THRESHOLD) {
        // 1 / (1 + w/2 + w²/6 + w³/24)
        let s = one + w * (one * lit::<T>(0.5) + w * (one / lit::<T>(6.0) + w / lit::<T>(24.0)));
        one / s
    } else {
        w / expm1(w)
    }
}

/// `H̃_M(x, t) = e^{t²x + t} / t`
fn h_m<T: Float>(x: Complex<T>, t: Complex<T>) -> Complex<T> {
    (t * t * x + t).exp() / t
}

/// `G̃_M(x, t, z) = −t x e^t z`
fn g_m<T: Float>(x: Complex<T>, t: Complex<T>, z: Complex<T>) -> Complex<T> {
    -(t * x * t.exp() * z)
}

/// `φ₁ = H̃_M(0,t) − H̃_M(x,t)`, `φ₂ = √(H̃_M(0,t) − H̃_M(0,1))`,
/// `Φ₃ = −t²x / (1 − e^{t²x}) · z` extended by `z` on `x = 0`.
pub fn eval_conjugacy<T: Float>(x: Complex<T>, t: Complex<T>, z: Complex<T>) -> Result<ConjugacyEval<T>> {
    if t.norm() == T::zero() {
        return Err(Error::Domain("conjugacy is undefined at t = 0".into()));
    }
    let w = t * t * x;
    let e_t_over_t = t.exp() / t;
    let phi1 = -(e_t_over_t * expm1(w));
    let e = Complex::new(T::one().exp(), T::zero());
    let phi2 = (e_t_over_t - e).sqrt();
    let phi3 = if x.norm() == T::zero() { z } else { w_over_expm1(w) * z };
    Ok(ConjugacyEval { x, t, z, phi1, phi2, phi3, branch: Branch::Principal })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals<T> {
    /// `|φ₁ Φ₃ − G̃_M|`
    pub r_g: T,
    /// `|(φ₂² − φ₁) − (H̃_M − H̃_M(0,1))|`
    pub r_h: T,
    pub r_g_relative: T,
    pub r_h_relative: T,
}

fn relative<T: Float>(abs: T, scale: T) -> T {
    if abs == T::zero() {
        T::zero()
    } else {
        abs / scale.max(T::min_positive_value())
    }
}

pub fn conjugacy_identity_residuals<T: Float>(x: Complex<T>, t: Complex<T>, z: Complex<T>) -> Result<Residuals<T>> {
    let c = eval_conjugacy(x, t, z)?;
    let lhs_g = c.phi1 * c.phi3;
    let rhs_g = g_m(x, t, z);
    let r_g = (lhs_g - rhs_g).norm();

    let e = Complex::new(T::one().exp(), T::zero());
    let p2 = c.phi2 * c.phi2;
    let hm = h_m(x, t);
    let r_h = ((p2 - c.phi1) - (hm - e)).norm();
    let scale_h = [p2.norm(), c.phi1.norm(), hm.norm(), e.norm()].into_iter().fold(T::zero(), T::max);
    Ok(Residuals {
        r_g,
        r_h,
        r_g_relative: relative(r_g, lhs_g.norm().max(rhs_g.norm())),
        r_h_relative: relative(r_h, scale_h),
    })
}

/// Polar grid over `|x| ≤ x_radius`, `t_min ≤ |t| ≤ t_max`, `|z| ≤ z_radius`.
///
/// Moduli are evenly spaced (the first `x` modulus is 0, so the divisor is
/// sampled); arguments advance by golden-ratio turns so no two axes align.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugacyGrid {
    pub nx: usize,
    pub nt: usize,
    pub nz: usize,
    pub x_radius: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub z_radius: f64,
}

impl Default for ConjugacyGrid {
    fn default() -> Self {
        ConjugacyGrid { nx: 20, nt: 20, nz: 5, x_radius: 0.3, t_min: 0.5, t_max: 2.0, z_radius: 1.0 }
    }
}

const GOLDEN_TURN: f64 = 0.618_033_988_749_894_9;

fn spaced(n: usize, lo: f64, hi: f64, i: usize) -> f64 {
    if n <= 1 {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn turn(i: usize, offset: f64) -> f64 {
    std::f64::consts::TAU * (i as f64 * GOLDEN_TURN + offset).fract()
}

impl ConjugacyGrid {
    pub fn validate(&self) -> Result<()> {
        let sizes_ok = self.nx > 0 && self.nt > 0 && self.nz > 0;
        let radii_ok = self.x_radius >= 0.0 && self.z_radius >= 0.0 && self.t_min > 0.0 && self.t_max >= self.t_min;
        if sizes_ok && radii_ok && [self.x_radius, self.t_min, self.t_max, self.z_radius].iter().all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Precondition("grid needs positive sizes, finite radii and 0 < t_min <= t_max".into()))
        }
    }

    pub fn points(&self) -> Vec<[Complex<f64>; 3]> {
        let mut out = Vec::with_capacity(self.nx * self.nt * self.nz);
        for i in 0..self.nx {
            let x = Complex::from_polar(spaced(self.nx, 0.0, self.x_radius, i), turn(i, 0.0));
            for j in 0..self.nt {
                let t = Complex::from_polar(spaced(self.nt, self.t_min, self.t_max, j), turn(j, 0.25));
                for k in 0..self.nz {
                    let z = Complex::from_polar(spaced(self.nz, 0.0, self.z_radius, k), turn(k, 0.5));
                    out.push([x, t, z]);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridRow {
    pub point: [Complex<f64>; 3],
    pub eval: ConjugacyEval<f64>,
    pub residuals: Residuals<f64>,
    /// `|Φ₃ − z| ≤ |t²x|·max(|z|, 1)`
    pub phi3_bound_ok: bool,
    /// on `x = 0`, `Φ₃ = z` bit for bit (vacuously true elsewhere)
    pub divisor_exact: bool,
}

pub fn evaluate_grid(grid: &ConjugacyGrid) -> Result<Vec<GridRow>> {
    grid.validate()?;
    grid.points()
        .into_iter()
        .map(|point| {
            let [x, t, z] = point;
            let eval = eval_conjugacy(x, t, z)?;
            let residuals = conjugacy_identity_residuals(x, t, z)?;
            let w = (t * t * x).norm();
            Ok(GridRow {
                point,
                eval,
                residuals,
                phi3_bound_ok: (eval.phi3 - z).norm() <= w * z.norm().max(1.0),
                divisor_exact: x.norm() != 0.0 || eval.phi3 == z,
            })
        })
        .collect()
}
