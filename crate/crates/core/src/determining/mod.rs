//! Determining equations for the coefficients of a candidate operator,
//! checked directly rather than through the prolongation.

mod conformal;

pub use conformal::{conformal_form_check, reconstruct, ConformalAnsatz};

use crate::error::{Error, Result};
use crate::expr::rational::{self, qr};
use crate::expr::zero::is_zero;
use crate::expr::{diff, Poly, Var, Verdict};
use crate::jet::{check_rhs, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// The system for an arbitrary right-hand side.
    General,
    /// The split system for a right-hand side quadratic in `ut`.
    Quadratic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub label: String,
    /// Left side minus right side.
    pub residual: Poly,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub kind: SystemKind,
    pub equations: Vec<Equation>,
}

impl DeterminingSystem {
    pub fn all_zero(&self) -> bool {
        self.equations.iter().all(|e| e.verdict.is_zero())
    }

    pub fn any_nonzero(&self) -> bool {
        self.equations.iter().any(|e| e.verdict.is_nonzero())
    }

    pub fn first_nonzero(&self) -> Option<&Equation> {
        self.equations.iter().find(|e| e.verdict.is_nonzero())
    }

    pub fn get(&self, label: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.label == label)
    }

    /// Zero, NonZero (first failing witness) or Unknown for the system.
    pub fn verdict(&self) -> Verdict {
        if let Some(e) = self.first_nonzero() {
            return e.verdict.clone();
        }
        if self.all_zero() {
            Verdict::Zero
        } else {
            Verdict::Unknown
        }
    }
}

fn equation(label: String, residual: Poly) -> Equation {
    let verdict = is_zero(&residual);
    Equation {
        label,
        residual,
        verdict,
    }
}

fn x(a: usize) -> Var {
    Var::X(a as u8)
}

/// Conditions on the spatial part: skew symmetry of `xi^a_b` off the
/// diagonal and a common diagonal.
fn spatial_conditions(q: &VectorField) -> Vec<Equation> {
    let n = q.n;
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            let r = diff(&q.xi[a - 1], x(b)).add(&diff(&q.xi[b - 1], x(a)));
            out.push(equation(format!("xi{a}_x{b} + xi{b}_x{a}"), r));
        }
    }
    let d11 = diff(&q.xi[0], x(1));
    for a in 2..=n {
        let r = diff(&q.xi[a - 1], x(a)).sub(&d11);
        out.push(equation(format!("xi{a}_x{a} - xi1_x1"), r));
    }
    out
}

fn check_dims(q: &VectorField, n: usize) -> Result<()> {
    if q.n != n {
        return Err(Error::DimensionMismatch(q.n, n));
    }
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    q.validate()
}

/// The general system: spatial conditions, one linear-in-`u_a` equation
/// per index `a`, and the scalar equation for `F`.
pub fn determining_residuals(q: &VectorField, f: &Poly, n: usize) -> Result<DeterminingSystem> {
    check_rhs(f)?;
    check_dims(q, n)?;
    let ut = Poly::var(Var::Ut);
    let two = rational::q(2);
    let f_t = diff(f, Var::T);
    let f_u = diff(f, Var::U);
    let f_ut = diff(f, Var::Ut);
    let mut equations = spatial_conditions(q);
    for a in 1..=n {
        let xa = &q.xi[a - 1];
        let r = diff(xa, Var::T)
            .add(&diff(xa, Var::U).mul(&ut))
            .mul(&f_ut)
            .sub(&diff(xa, Var::U).mul(f).scale(&two))
            .add(&diff(&q.eta, x(a)).scale(&two))
            .sub(&ut.mul(&diff(&q.xi0, x(a))).scale(&two));
        equations.push(equation(format!("spatial[{a}]"), r));
    }
    let xi0_u = diff(&q.xi0, Var::U);
    let eta_u = diff(&q.eta, Var::U);
    let bracket = diff(&q.eta, Var::T)
        .add(&eta_u.sub(&diff(&q.xi0, Var::T)).mul(&ut))
        .sub(&xi0_u.mul(&ut.powi(2)));
    let lhs = q.xi0.mul(&f_t).add(&q.eta.mul(&f_u)).add(&bracket.mul(&f_ut));
    let rhs = eta_u
        .sub(&diff(&q.xi[0], x(1)))
        .sub(&xi0_u.mul(&ut))
        .mul(f)
        .scale(&two);
    equations.push(equation("rhs".into(), lhs.sub(&rhs)));
    Ok(DeterminingSystem {
        kind: SystemKind::General,
        equations,
    })
}

/// The system obtained by splitting in `ut` when `F = A ut^2 + B ut + C`.
pub fn quadratic_split_residuals(
    q: &VectorField,
    a: &Poly,
    b: &Poly,
    c: &Poly,
    n: usize,
) -> Result<DeterminingSystem> {
    check_dims(q, n)?;
    for (name, p) in [("A", a), ("B", b), ("C", c)] {
        if let Some(v) = p.free_vars().into_iter().find(|v| !matches!(v, Var::T | Var::U)) {
            return Err(Error::IllegalDependence(format!("{name} depends on {}", v.name())));
        }
    }
    let half = qr(1, 2);
    let two = rational::q(2);
    let mut equations = spatial_conditions(q);
    for k in 1..=n {
        let xk = &q.xi[k - 1];
        let xk_t = diff(xk, Var::T);
        let xk_u = diff(xk, Var::U);
        let r0 = diff(&q.xi0, x(k))
            .sub(&a.mul(&xk_t))
            .add(&b.mul(&xk_u).scale(&half));
        equations.push(equation(format!("xi0_x{k}"), r0));
        let r1 = diff(&q.eta, x(k))
            .sub(&c.mul(&xk_u))
            .add(&b.mul(&xk_t).scale(&half));
        equations.push(equation(format!("eta_x{k}"), r1));
    }
    let (xi0, eta) = (&q.xi0, &q.eta);
    let xi0_t = diff(xi0, Var::T);
    let xi0_u = diff(xi0, Var::U);
    let eta_t = diff(eta, Var::T);
    let eta_u = diff(eta, Var::U);
    let d11 = diff(&q.xi[0], x(1));
    let flow = |p: &Poly| diff(p, Var::T).mul(xi0).add(&diff(p, Var::U).mul(eta));
    let ra = flow(a)
        .add(&b.mul(&xi0_u))
        .sub(&a.mul(&xi0_t.sub(&d11)).scale(&two));
    equations.push(equation("A".into(), ra));
    let rc = flow(c)
        .add(&b.mul(&eta_t))
        .sub(&c.mul(&eta_u.sub(&d11)).scale(&two));
    equations.push(equation("C".into(), rc));
    let rb = flow(b)
        .add(&a.mul(&eta_t).scale(&two))
        .add(&c.mul(&xi0_u).scale(&two))
        .sub(&b.mul(&eta_u.add(&xi0_t).sub(&d11.scale(&two))));
    equations.push(equation("B".into(), rb));
    Ok(DeterminingSystem {
        kind: SystemKind::Quadratic,
        equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::opaque_app;

    fn t() -> Poly {
        Poly::var(Var::T)
    }

    #[test]
    fn rotation_opaque_rhs() {
        let f = opaque_app("F", vec![t(), Poly::var(Var::U), Poly::var(Var::Ut)]);
        let s = determining_residuals(&VectorField::rotation(3, 1, 2), &f, 3).unwrap();
        assert!(s.all_zero());
    }

    #[test]
    fn dt_on_exponential() {
        let f = t().exp().mul(&opaque_app("f", vec![Poly::var(Var::U), Poly::var(Var::Ut)]));
        let s = determining_residuals(&VectorField::dt(2), &f, 2).unwrap();
        assert!(s.get("rhs").unwrap().verdict.is_nonzero());
        assert!(symbolic_eq(&s.get("rhs").unwrap().residual, &f));
    }

    fn symbolic_eq(a: &Poly, b: &Poly) -> bool {
        crate::expr::symbolic_zero(&a.sub(b))
    }
}
