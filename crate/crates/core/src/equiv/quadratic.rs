use super::EquivTransform;
use crate::error::{Error, Result};
use crate::expr::rational::q;
use crate::expr::zero::is_zero;
use crate::expr::{diff, Poly, Var};

/// `F = A ut^2 + B ut + C` with coefficients in (t, u).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    disc: Poly,
}

impl QuadraticForm {
    pub fn new(a: Poly, b: Poly, c: Poly) -> Result<Self> {
        for (name, p) in [("A", &a), ("B", &b), ("C", &c)] {
            if let Some(v) = p.free_vars().into_iter().find(|v| !matches!(v, Var::T | Var::U)) {
                return Err(Error::IllegalDependence(format!("{name} depends on {}", v.name())));
            }
        }
        if [&a, &b, &c].iter().all(|p| is_zero(p).is_zero()) {
            return Err(Error::ConstraintViolation("A, B, C all vanish".into()));
        }
        let disc = b.powi(2).sub(&a.mul(&c).scale(&q(4)));
        Ok(QuadraticForm { a, b, c, disc })
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(Poly::int(a), Poly::int(b), Poly::int(c))
    }

    pub fn discriminant(&self) -> &Poly {
        &self.disc
    }

    pub fn rhs(&self) -> Poly {
        let ut = Poly::var(Var::Ut);
        self.a.mul(&ut.powi(2)).add(&self.b.mul(&ut)).add(&self.c)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Result<Self> {
        Self::new(f(&self.a), f(&self.b), f(&self.c))
    }
}

pub fn discriminant(qf: &QuadraticForm) -> Poly {
    qf.disc.clone()
}

/// New coefficients as functions of the old variables.
pub fn coefficient_map(qf: &QuadraticForm, zeta: &Poly, phi: &Poly, delta: &Poly) -> Result<QuadraticForm> {
    let zt = diff(zeta, Var::T);
    let zu = diff(zeta, Var::U);
    let pt = diff(phi, Var::T);
    let pu = diff(phi, Var::U);
    let (a, b, c) = (&qf.a, &qf.b, &qf.c);
    let two = q(2);
    let d2 = delta.powi(-2);
    let na = a.mul(&zt.powi(2)).sub(&b.mul(&zt).mul(&zu)).add(&c.mul(&zu.powi(2)));
    let nb = b
        .mul(&zt.mul(&pu).add(&zu.mul(&pt)))
        .sub(&a.mul(&zt).mul(&pt).scale(&two))
        .sub(&c.mul(&zu).mul(&pu).scale(&two));
    let nc = a.mul(&pt.powi(2)).sub(&b.mul(&pt).mul(&pu)).add(&c.mul(&pu.powi(2)));
    QuadraticForm::new(na.mul(&d2), nb.mul(&d2), nc.mul(&d2))
}

/// The transformed coefficients in the new variables. For a restricted
/// transform `zeta_t` is the constant `delta_hat` and `phi_t = 0`, which
/// reduces the general map to its three-term specialization.
pub fn transform_quadratic(qf: &QuadraticForm, tr: &EquivTransform) -> Result<QuadraticForm> {
    let old = coefficient_map(qf, &tr.zeta, &tr.phi, &tr.delta)?;
    old.map(|p| tr.to_new(p))
}
