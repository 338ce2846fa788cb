//! Point equivalence transformations `t~ = zeta(t, u)`, `u~ = phi(t, u)`,
//! `x~ = delta x` and their action on the right-hand side.

mod generators;
mod integrate;
mod quadratic;
mod reductions;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use generators::{check_generator, equivalence_generators, ExtendedField};
pub use integrate::antiderivative;
pub use quadratic::{coefficient_map, discriminant, transform_quadratic, QuadraticForm};
pub use reductions::{reduction_catalog, reduction_names, ReductionParams};

use crate::error::{Error, Result};
use crate::expr::calculus::substitute;
use crate::expr::eval::eval;
use crate::expr::rational::q;
use crate::expr::zero::{is_zero, symbolic_zero};
use crate::expr::{diff, Atom, OpaqueTable, Poly, Var};
use crate::jet::{check_rhs, VectorField};

/// Sampling box for round-trip checks, as `(lo, hi)` per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub t: (f64, f64),
    pub u: (f64, f64),
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            t: (-2.0, 2.0),
            u: (-2.0, 2.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivTransform {
    pub zeta: Poly,
    pub phi: Poly,
    pub delta: Poly,
    /// Set for the restricted action on `t`-independent right-hand sides:
    /// `zeta = delta_hat t + z(u)` and `phi = phi(u)`.
    pub delta_hat: Option<Poly>,
    /// Inverse pair, written in `t`, `u` standing for the new variables.
    pub zeta_inv: Poly,
    pub phi_inv: Poly,
    pub domain: Domain,
}

fn only_tu(name: &str, p: &Poly) -> Result<()> {
    match p.free_vars().into_iter().find(|v| !matches!(v, Var::T | Var::U)) {
        Some(v) => Err(Error::IllegalDependence(format!("{name} depends on {}", v.name()))),
        None => Ok(()),
    }
}

pub fn jacobian(zeta: &Poly, phi: &Poly) -> Poly {
    diff(zeta, Var::T)
        .mul(&diff(phi, Var::U))
        .sub(&diff(zeta, Var::U).mul(&diff(phi, Var::T)))
}

impl EquivTransform {
    pub fn new(zeta: Poly, phi: Poly, delta: Poly, zeta_inv: Poly, phi_inv: Poly) -> Result<Self> {
        for (name, p) in [("zeta", &zeta), ("phi", &phi), ("zeta_inv", &zeta_inv), ("phi_inv", &phi_inv)] {
            only_tu(name, p)?;
        }
        if !delta.free_vars().is_empty() {
            return Err(Error::IllegalDependence("delta must be constant".into()));
        }
        if is_zero(&delta).is_zero() {
            return Err(Error::NotInvertible("delta = 0".into()));
        }
        if is_zero(&jacobian(&zeta, &phi)).is_zero() {
            return Err(Error::NotInvertible("the Jacobian of (zeta, phi) vanishes".into()));
        }
        Ok(EquivTransform {
            zeta,
            phi,
            delta,
            delta_hat: None,
            zeta_inv,
            phi_inv,
            domain: Domain::default(),
        })
    }

    /// The restricted form with `zeta = delta_hat t + z(u)`.
    pub fn restricted(delta_hat: Poly, z: Poly, phi: Poly, delta: Poly, zeta_inv: Poly, phi_inv: Poly) -> Result<Self> {
        for (name, p) in [("zeta", &z), ("phi", &phi)] {
            if p.depends_on(Var::T) {
                return Err(Error::IllegalDependence(format!("{name} must not depend on t")));
            }
        }
        if !delta_hat.free_vars().is_empty() || is_zero(&delta_hat).is_zero() {
            return Err(Error::NotInvertible("delta_hat must be a nonzero constant".into()));
        }
        let zeta = delta_hat.mul(&Poly::var(Var::T)).add(&z);
        let mut t = Self::new(zeta, phi, delta, zeta_inv, phi_inv)?;
        t.delta_hat = Some(delta_hat);
        Ok(t)
    }

    pub fn identity() -> Self {
        EquivTransform {
            zeta: Poly::var(Var::T),
            phi: Poly::var(Var::U),
            delta: Poly::one(),
            delta_hat: Some(Poly::one()),
            zeta_inv: Poly::var(Var::T),
            phi_inv: Poly::var(Var::U),
            domain: Domain::default(),
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn jacobian(&self) -> Poly {
        jacobian(&self.zeta, &self.phi)
    }

    /// Rewrites a function of the old `(t, u)` in the new variables.
    pub fn to_new(&self, p: &Poly) -> Poly {
        substitute(p, &self.inverse_bindings())
    }

    /// Rewrites a function of the new `(t, u)` in the old variables.
    pub fn to_old(&self, p: &Poly) -> Poly {
        substitute(p, &self.forward_bindings())
    }

    fn inverse_bindings(&self) -> BTreeMap<Var, Poly> {
        [(Var::T, self.zeta_inv.clone()), (Var::U, self.phi_inv.clone())].into()
    }

    fn forward_bindings(&self) -> BTreeMap<Var, Poly> {
        [(Var::T, self.zeta.clone()), (Var::U, self.phi.clone())].into()
    }

    pub fn inverse(&self) -> EquivTransform {
        EquivTransform {
            zeta: self.zeta_inv.clone(),
            phi: self.phi_inv.clone(),
            delta: self.delta.powi(-1),
            delta_hat: self.delta_hat.as_ref().map(|d| d.powi(-1)),
            zeta_inv: self.zeta.clone(),
            phi_inv: self.phi.clone(),
            domain: self.domain.clone(),
        }
    }
}

/// `p * d^k`, letting a root of `d` cancel reciprocal roots already in `p`.
fn mul_power(p: &Poly, d: &Poly, k: i64) -> Poly {
    if d.len() <= 1 {
        return p.mul(&d.powi(k));
    }
    let (content, gcd, base) = d.primitive_split(true);
    let pre = Poly::constant(content).powi(k).mul(&Poly::from_term(gcd, q(1)).powi(k));
    let exps: BTreeMap<Atom, crate::expr::Q> = [(Atom::Root(Arc::new(base)), q(k))].into();
    p.mul(&pre).mul_exps(&exps)
}

/// The transformed right-hand side in the new variables (`t`, `u`, `ut`
/// standing for `t~`, `u~`, `u~_t~`).
pub fn transform_f(f: &Poly, tr: &EquivTransform) -> Result<Poly> {
    check_rhs(f)?;
    let w = Poly::var(Var::Ut);
    let parts = [
        diff(&tr.zeta, Var::T),
        diff(&tr.zeta, Var::U),
        diff(&tr.phi, Var::T),
        diff(&tr.phi, Var::U),
    ];
    let [zt, zu, pt, pu] = parts.map(|p| tr.to_new(&p));
    let den = zu.mul(&w).sub(&pu);
    if den.is_zero() {
        return Err(Error::NotInvertible("zeta_u ut - phi_u vanishes".into()));
    }
    let ut = mul_power(&pt.sub(&zt.mul(&w)), &den, -1);
    let mut b = tr.inverse_bindings();
    b.insert(Var::Ut, ut);
    let fs = substitute(f, &b);
    Ok(mul_power(&fs, &den, 2).mul(&tr.delta.powi(-2)))
}

/// `T2` after `T1`.
pub fn compose(t1: &EquivTransform, t2: &EquivTransform) -> EquivTransform {
    let fwd = t1.forward_bindings();
    let inv = t2.inverse_bindings();
    EquivTransform {
        zeta: substitute(&t2.zeta, &fwd),
        phi: substitute(&t2.phi, &fwd),
        delta: t1.delta.mul(&t2.delta),
        delta_hat: match (&t1.delta_hat, &t2.delta_hat) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        },
        zeta_inv: substitute(&t1.zeta_inv, &inv),
        phi_inv: substitute(&t1.phi_inv, &inv),
        domain: t1.domain.clone(),
    }
}

pub const ROUND_TRIP_POINTS: usize = 25;
pub const ROUND_TRIP_TOL: f64 = 1e-8;

fn eval_tu(p: &Poly, t: f64, u: f64, params: &BTreeMap<String, f64>) -> Option<f64> {
    let mut env = crate::expr::Env::new().with(Var::T, t).with(Var::U, u);
    env.params = params.clone();
    eval(p, &env, &OpaqueTable::new()).ok()
}

/// Maps random points forward and back; true when all 25 return within
/// tolerance. Free parameters are drawn once in `[0.5, 1.5]`.
pub fn verify_inverse(tr: &EquivTransform) -> bool {
    verify_inverse_seeded(tr, 0x1eaf)
}

pub fn verify_inverse_seeded(tr: &EquivTransform, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = BTreeMap::new();
    for p in [&tr.zeta, &tr.phi, &tr.zeta_inv, &tr.phi_inv] {
        for par in p.params() {
            params.entry(par.name.to_string()).or_insert_with(|| rng.gen_range(0.5..1.5));
        }
    }
    let d = &tr.domain;
    let mut ok = 0;
    for _ in 0..40 * ROUND_TRIP_POINTS {
        let t = rng.gen_range(d.t.0..d.t.1);
        let u = rng.gen_range(d.u.0..d.u.1);
        let (Some(nt), Some(nu)) = (eval_tu(&tr.zeta, t, u, &params), eval_tu(&tr.phi, t, u, &params)) else {
            continue;
        };
        let (Some(bt), Some(bu)) = (eval_tu(&tr.zeta_inv, nt, nu, &params), eval_tu(&tr.phi_inv, nt, nu, &params)) else {
            continue;
        };
        let close = |a: f64, b: f64| (a - b).abs() <= ROUND_TRIP_TOL * a.abs().max(1.0);
        if !close(bt, t) || !close(bu, u) {
            return false;
        }
        ok += 1;
        if ok == ROUND_TRIP_POINTS {
            return true;
        }
    }
    false
}

/// The image of `q` under the point map, with coefficients in the new
/// variables; `x` is scaled by `delta`.
pub fn push_forward(q: &VectorField, tr: &EquivTransform) -> VectorField {
    let n = q.n;
    let mut b = tr.inverse_bindings();
    let dinv = tr.delta.powi(-1);
    for a in 1..=n {
        b.insert(Var::X(a as u8), Poly::var(Var::X(a as u8)).mul(&dinv));
    }
    let new = |p: &Poly| substitute(p, &b);
    VectorField {
        n,
        xi0: new(&q.apply(&tr.zeta)),
        xi: q.xi.iter().map(|c| new(&c.mul(&tr.delta))).collect(),
        eta: new(&q.apply(&tr.phi)),
    }
}

/// True when two right-hand sides agree up to the zero test.
pub fn same_rhs(a: &Poly, b: &Poly) -> bool {
    symbolic_zero(&a.sub(b))
}
