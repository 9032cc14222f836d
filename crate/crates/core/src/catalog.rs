//! The concrete fields and first integrals of the integrable / non-integrable
//! pair on (C^3, 0), built over the variables `x, y, z`.
//!
//! `field_x` restricts on `{z = 0}` to the Cerveau-Mattei foliation and has
//! two independent polynomial first integrals; `field_y` restricts to Suzuki's
//! foliation and only has transcendent ones.

use crate::{rat, QDarboux, QField, QPoly, QRational, VarSet};

fn v(name: &str) -> QPoly {
    QPoly::var(VarSet::xyz(), name).expect("x, y, z")
}

fn k(n: i64) -> QPoly {
    QPoly::constant(VarSet::xyz(), rat(n))
}

/// `2xy ∂x + (x³ + 2y²) ∂y − 2yz ∂z`
pub fn field_x() -> QField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    QField::new(vec![&(&k(2) * &x) * &y, &x.pow(3) + &(&k(2) * &y.pow(2)), &(&k(-2) * &y) * &z]).expect("valid field")
}

/// `x(x − 2y² − y) ∂x + y(x − y² − y) ∂y − z(x − y² − y) ∂z`
pub fn field_y() -> QField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let a = &(&x - &(&k(2) * &y.pow(2))) - &y;
    let b = &(&x - &y.pow(2)) - &y;
    QField::new(vec![&x * &a, &y * &b, -&(&z * &b)]).expect("valid field")
}

/// `x ∂x + y ∂y − z ∂z`
pub fn linear_saddle() -> QField {
    QField::new(vec![v("x"), v("y"), -v("z")]).expect("valid field")
}

/// `(F, G) = ((y² − x³) z², x z)`
pub fn holomorphic_integrals() -> (QPoly, QPoly) {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    (&(&y.pow(2) - &x.pow(3)) * &z.pow(2), &x * &z)
}

/// `(y² − x³) / x²`
pub fn meromorphic_integral() -> QRational {
    let (x, y) = (v("x"), v("y"));
    QRational::new(&y.pow(2) - &x.pow(3), x.pow(2)).expect("nonzero denominator")
}

/// `((x/y) e^{(y² + y)/x}, −y z e^{y/x})`
pub fn transcendent_integrals() -> (QDarboux, QDarboux) {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let h = QDarboux::new(
        QRational::new(x.clone(), y.clone()).unwrap(),
        QRational::new(&y.pow(2) + &y, x.clone()).unwrap(),
    )
    .unwrap();
    let g = QDarboux::new(QRational::from_poly(-&(&y * &z)), QRational::new(y, x).unwrap()).unwrap();
    (h, g)
}
