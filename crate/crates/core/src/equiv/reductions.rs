use std::collections::BTreeMap;

use super::integrate::antiderivative;
use super::{Domain, EquivTransform};
use crate::error::{Error, Result};
use crate::expr::calculus::substitute_var;
use crate::expr::rational::{q, qr, to_f64};
use crate::expr::zero::is_zero;
use crate::expr::{Func, Poly, Var};

/// Named parameter values (`mu`, `nu`, `beta`, `delta`, `k`, `alpha`);
/// all but `alpha` must be constants, `alpha` is a function of `u`.
pub type ReductionParams = BTreeMap<String, Poly>;

const REGISTRY: &[(&str, &[&str])] = &[
    ("identity", &[]),
    ("exp-scale", &["mu"]),
    ("exp-scale-shift", &["mu"]),
    ("sinh-cosh", &["mu"]),
    ("sin-cos", &["mu"]),
    ("power-u", &["mu", "nu"]),
    ("sum-difference", &[]),
    ("exp-ut", &["alpha"]),
    ("shear", &["delta"]),
    ("shear-exp", &["mu", "delta", "beta"]),
    ("x-scale", &["delta"]),
    ("t-scale", &["k"]),
    ("u-scale", &["k"]),
    ("t-translate", &["k"]),
    ("u-translate", &["k"]),
    ("swap", &[]),
];

pub fn reduction_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

fn t() -> Poly {
    Poly::var(Var::T)
}

fn u() -> Poly {
    Poly::var(Var::U)
}

fn box_above(lo: f64) -> Domain {
    Domain {
        t: (-2.0, 2.0),
        u: (lo + 0.2, lo + 3.0),
    }
}

fn numeric(p: &Poly) -> f64 {
    p.as_constant().map(|c| to_f64(&c)).unwrap_or(0.0)
}

/// Builds a named reduction with its inverse.
pub fn reduction_catalog(name: &str, params: &ReductionParams) -> Result<EquivTransform> {
    let slots = REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownReduction(name.to_string()))?;
    let mut vals: BTreeMap<&str, Poly> = BTreeMap::new();
    for s in slots {
        let v = params
            .get(*s)
            .ok_or_else(|| Error::MissingParameter(format!("`{s}` for {name}")))?;
        if *s != "alpha" && !v.free_vars().is_empty() {
            return Err(Error::ConstraintViolation(format!("`{s}` must be constant")));
        }
        vals.insert(s, v.clone());
    }
    let nonzero = |s: &str| -> Result<Poly> {
        let v = vals[s].clone();
        if is_zero(&v).is_zero() {
            return Err(Error::ConstraintViolation(format!("`{s}` must be nonzero for {name}")));
        }
        Ok(v)
    };
    let one = Poly::one;
    let tr = match name {
        "identity" => return Ok(EquivTransform::identity()),
        "exp-scale" | "exp-scale-shift" => {
            let mu = nonzero("mu")?;
            let inv_mu = mu.powi(-1);
            let e = mu.mul(&t()).exp();
            let lt = mu.mul(&t()).ln().mul(&inv_mu);
            let (phi, phi_inv) = if name == "exp-scale" {
                (e.mul(&u()), u().mul(&mu.mul(&t()).powi(-1)))
            } else {
                let two = q(2);
                let inner = u().add(&t().scale(&two)).sub(&inv_mu.scale(&two));
                let back = u()
                    .mul(&mu.mul(&t()).powi(-1))
                    .sub(&lt.scale(&two))
                    .add(&inv_mu.scale(&two));
                (e.mul(&inner), back)
            };
            EquivTransform::new(e.mul(&inv_mu), phi, one(), lt, phi_inv)?
        }
        "sinh-cosh" => {
            let mu = vals["mu"].clone();
            let s = u().add(&mu);
            let half = qr(1, 2);
            let zeta_inv = u().add(&t()).mul(&u().sub(&t()).powi(-1)).ln().scale(&half);
            let phi_inv = u().powi(2).sub(&t().powi(2)).pow_q(&half).sub(&mu);
            EquivTransform::new(
                s.mul(&t().apply(Func::Sinh)),
                s.mul(&t().apply(Func::Cosh)),
                one(),
                zeta_inv,
                phi_inv,
            )?
            .with_domain(box_above(-numeric(&mu)))
        }
        "sin-cos" => {
            let mu = vals["mu"].clone();
            let s = u().add(&mu);
            let zeta_inv = t().mul(&u().powi(-1)).apply(Func::Atan);
            let phi_inv = u().powi(2).add(&t().powi(2)).pow_q(&qr(1, 2)).sub(&mu);
            let mut d = box_above(-numeric(&mu));
            d.t = (-1.2, 1.2);
            EquivTransform::new(
                s.mul(&t().apply(Func::Sin)),
                s.mul(&t().apply(Func::Cos)),
                one(),
                zeta_inv,
                phi_inv,
            )?
            .with_domain(d)
        }
        "power-u" => {
            let mu = vals["mu"].clone();
            let nu = vals["nu"].clone();
            let p = one().sub(&nu.scale(&qr(1, 2)));
            if is_zero(&p).is_zero() {
                return Err(Error::ConstraintViolation("power-u needs nu != 2".into()));
            }
            let phi = u().add(&mu).apply(Func::Abs).pow_poly(&p);
            let phi_inv = u().pow_poly(&p.powi(-1)).sub(&mu);
            EquivTransform::new(t(), phi, one(), t(), phi_inv)?.with_domain(box_above(-numeric(&mu)))
        }
        "sum-difference" => {
            let half = qr(1, 2);
            EquivTransform::new(
                t().add(&u()),
                t().sub(&u()),
                one(),
                t().add(&u()).scale(&half),
                t().sub(&u()).scale(&half),
            )?
        }
        "exp-ut" => {
            let alpha = vals["alpha"].clone();
            if alpha.free_vars().iter().any(|v| *v != Var::U) {
                return Err(Error::ConstraintViolation("alpha must depend on u only".into()));
            }
            let g = antiderivative(&alpha.ln(), Var::U).ok_or_else(|| {
                Error::MissingParameter(format!("no tabulated antiderivative of ln({alpha})"))
            })?;
            let zeta_inv = u().sub(&substitute_var(&g, Var::U, &t()));
            EquivTransform::new(u(), t().add(&g), one(), zeta_inv, t())?
                .with_domain(box_above(0.0))
        }
        "shear" => {
            let k = vals["delta"].clone();
            EquivTransform::new(t(), u().add(&k.mul(&t())), one(), t(), u().sub(&k.mul(&t())))?
        }
        "shear-exp" => {
            let mu = nonzero("mu")?;
            let delta = nonzero("delta")?;
            let beta = nonzero("beta")?;
            let bm2 = beta.sub(&Poly::int(2));
            if is_zero(&bm2).is_zero() {
                return Err(Error::ConstraintViolation("shear-exp needs beta != 2".into()));
            }
            let a = mu.mul(&delta).mul(&beta.powi(-1));
            let c = mu.mul(&bm2.powi(-1));
            let zeta = a.mul(&t()).exp().mul(&a.powi(-1));
            let phi = c.mul(&u().add(&delta.mul(&t()))).exp().mul(&c.powi(-1));
            let lt = a.mul(&t()).ln().mul(&a.powi(-1));
            let phi_inv = c.mul(&u()).ln().mul(&c.powi(-1)).sub(&delta.mul(&lt));
            EquivTransform::new(zeta, phi, one(), lt, phi_inv)?
        }
        "x-scale" => EquivTransform::new(t(), u(), nonzero("delta")?, t(), u())?,
        "t-scale" => {
            let k = nonzero("k")?;
            EquivTransform::new(k.mul(&t()), u(), one(), t().mul(&k.powi(-1)), u())?
        }
        "u-scale" => {
            let k = nonzero("k")?;
            EquivTransform::new(t(), k.mul(&u()), one(), t(), u().mul(&k.powi(-1)))?
        }
        "t-translate" => {
            let k = vals["k"].clone();
            EquivTransform::new(t().add(&k), u(), one(), t().sub(&k), u())?
        }
        "u-translate" => {
            let k = vals["k"].clone();
            EquivTransform::new(t(), u().add(&k), one(), t(), u().sub(&k))?
        }
        "swap" => EquivTransform::new(u(), t(), one(), u(), t())?,
        _ => unreachable!("registry and constructors agree"),
    };
    Ok(mark_restricted(tr))
}

/// Flags transforms of the restricted shape `zeta = c t + z(u)`,
/// `phi = phi(u)`.
fn mark_restricted(mut tr: EquivTransform) -> EquivTransform {
    if tr.phi.depends_on(Var::T) {
        return tr;
    }
    if let Some(cs) = tr.zeta.coefficients_in(Var::T) {
        if cs.len() == 2 && cs[1].free_vars().is_empty() && !cs.iter().any(|c| c.depends_on(Var::T)) {
            tr.delta_hat = Some(cs[1].clone());
        }
    }
    tr
}
