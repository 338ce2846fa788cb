use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::calculus::diff_n;
use super::poly::{Atom, Func, Poly, Var};
use super::rational::{to_f64, Q};
use crate::error::{Error, Result};

/// Numeric values for variables and parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    pub vars: BTreeMap<Var, f64>,
    pub params: BTreeMap<String, f64>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, x: f64) -> Self {
        self.vars.insert(v, x);
        self
    }

    pub fn with_param(mut self, name: &str, x: f64) -> Self {
        self.params.insert(name.to_string(), x);
        self
    }

    pub fn set(&mut self, v: Var, x: f64) {
        self.vars.insert(v, x);
    }
}

type Callable = dyn Fn(&[f64]) -> f64 + Send + Sync;

enum ImplKind {
    /// Body in the formal variables; derivatives are symbolic and cached.
    Symbolic {
        formals: Vec<Var>,
        body: Poly,
        cache: Mutex<HashMap<Vec<u32>, Poly>>,
    },
    /// Plain function; derivatives by central differences.
    Numeric(Arc<Callable>),
}

/// A concrete stand-in for an opaque symbol during evaluation.
#[derive(Clone)]
pub struct OpaqueImpl(Arc<ImplKind>);

impl std::fmt::Debug for OpaqueImpl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0.as_ref() {
            ImplKind::Symbolic { body, .. } => write!(f, "OpaqueImpl({body})"),
            ImplKind::Numeric(_) => write!(f, "OpaqueImpl(<fn>)"),
        }
    }
}

pub const FD_STEP: f64 = 1e-6;

impl OpaqueImpl {
    pub fn symbolic(formals: Vec<Var>, body: Poly) -> Self {
        OpaqueImpl(Arc::new(ImplKind::Symbolic {
            formals,
            body,
            cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn numeric(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        OpaqueImpl(Arc::new(ImplKind::Numeric(Arc::new(f))))
    }

    pub fn body(&self) -> Option<(&[Var], &Poly)> {
        match self.0.as_ref() {
            ImplKind::Symbolic { formals, body, .. } => Some((formals, body)),
            ImplKind::Numeric(_) => None,
        }
    }

    pub fn call(&self, args: &[f64], derivs: &[u32]) -> Result<f64> {
        match self.0.as_ref() {
            ImplKind::Symbolic {
                formals,
                body,
                cache,
            } => {
                let d = {
                    let mut g = cache.lock().expect("opaque cache poisoned");
                    g.entry(derivs.to_vec())
                        .or_insert_with(|| {
                            let mut d = body.clone();
                            for (i, k) in derivs.iter().enumerate() {
                                d = diff_n(&d, formals[i], *k as usize);
                            }
                            d
                        })
                        .clone()
                };
                let mut env = Env::new();
                for (v, x) in formals.iter().zip(args) {
                    env.set(*v, *x);
                }
                eval(&d, &env, &OpaqueTable::new())
            }
            ImplKind::Numeric(f) => Ok(central_diff(f.as_ref(), args, derivs)),
        }
    }
}

fn central_diff(f: &Callable, args: &[f64], derivs: &[u32]) -> f64 {
    if let Some(i) = derivs.iter().position(|k| *k > 0) {
        let mut lower = derivs.to_vec();
        lower[i] -= 1;
        let mut a = args.to_vec();
        a[i] += FD_STEP;
        let hi = central_diff(f, &a, &lower);
        a[i] -= 2.0 * FD_STEP;
        let lo = central_diff(f, &a, &lower);
        (hi - lo) / (2.0 * FD_STEP)
    } else {
        f(args)
    }
}

pub type OpaqueTable = BTreeMap<String, OpaqueImpl>;

/// Real power `x^e` for a rational exponent; odd-denominator roots of
/// negative numbers are taken as real roots.
pub fn pow_real(x: f64, e: &Q) -> Result<f64> {
    if e.denom() == &1.into() {
        let k = e.numer().to_i32().ok_or_else(|| Error::Domain("exponent overflow".into()))?;
        if x == 0.0 && k < 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        return Ok(x.powi(k));
    }
    let ef = to_f64(e);
    if x > 0.0 {
        return Ok(x.powf(ef));
    }
    if x == 0.0 {
        return if e.is_positive() {
            Ok(0.0)
        } else {
            Err(Error::Domain("division by zero".into()))
        };
    }
    if e.denom().is_odd() {
        let v = (-x).powf(ef);
        return Ok(if e.numer().is_odd() { -v } else { v });
    }
    Err(Error::Domain(format!("even root of negative number {x}")))
}

fn check(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain("non-finite value".into()))
    }
}

pub fn eval(p: &Poly, env: &Env, ops: &OpaqueTable) -> Result<f64> {
    Ok(eval_scaled(p, env, ops)?.0)
}

/// Returns the value together with the sum of absolute term values, which
/// callers use as a cancellation scale.
pub fn eval_scaled(p: &Poly, env: &Env, ops: &OpaqueTable) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (m, c) in p.terms() {
        let mut t = to_f64(c);
        for (a, e) in &m.0 {
            t *= eval_atom_pow(a, e, env, ops)?;
        }
        let t = check(t)?;
        sum += t;
        scale += t.abs();
    }
    Ok((check(sum)?, scale))
}

fn eval_atom_pow(a: &Atom, e: &Q, env: &Env, ops: &OpaqueTable) -> Result<f64> {
    match a {
        Atom::Func(Func::Exp, y) => check((to_f64(e) * eval(y, env, ops)?).exp()),
        Atom::Pow(b, m) => {
            let bv = eval(b, env, ops)?;
            let mv = eval(m, env, ops)? * to_f64(e);
            if bv <= 0.0 {
                let r = mv.round();
                if (mv - r).abs() < 1e-12 && bv != 0.0 {
                    return check(bv.powi(r as i32));
                }
                return Err(Error::Domain(format!("power of non-positive base {bv}")));
            }
            check(bv.powf(mv))
        }
        _ => check(pow_real(eval_atom(a, env, ops)?, e)?),
    }
}

fn eval_atom(a: &Atom, env: &Env, ops: &OpaqueTable) -> Result<f64> {
    match a {
        Atom::Surd(p) => Ok(to_f64(p)),
        Atom::Var(v) => env
            .vars
            .get(v)
            .copied()
            .ok_or_else(|| Error::MissingBinding(v.name())),
        Atom::Param(p) => env
            .params
            .get(p.name.as_ref())
            .copied()
            .ok_or_else(|| Error::MissingBinding(p.name.to_string())),
        Atom::Root(b) => eval(b, env, ops),
        Atom::Pow(..) => eval_atom_pow(a, &super::rational::q(1), env, ops),
        Atom::Func(f, y) => {
            let x = eval(y, env, ops)?;
            let v = match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(Error::Domain(format!("ln of non-positive {x}")));
                    }
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Atan => x.atan(),
                Func::Abs => x.abs(),
                Func::Sign => {
                    if x == 0.0 {
                        return Err(Error::Domain("sign of zero".into()));
                    }
                    x.signum()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(Error::Domain(format!("sqrt of negative {x}")));
                    }
                    x.sqrt()
                }
            };
            check(v)
        }
        Atom::Opaque(o) => {
            let imp = ops
                .get(o.name.as_ref())
                .ok_or_else(|| Error::MissingBinding(o.name.to_string()))?;
            let args = o
                .args
                .iter()
                .map(|x| eval(x, env, ops))
                .collect::<Result<Vec<_>>>()?;
            check(imp.call(&args, &o.derivs)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational::{q, qr};

    #[test]
    fn basic_values() {
        let u = Poly::var(Var::U);
        let ut = Poly::var(Var::Ut);
        let env = Env::new().with(Var::U, 0.0).with(Var::Ut, 2.0);
        let ops = OpaqueTable::new();
        assert_eq!(eval(&u.exp(), &env, &ops).unwrap(), 1.0);
        let f = u.apply(Func::Cosh).powi(-2).mul(&ut.powi(2)).add(&Poly::one());
        assert!((eval(&f, &env, &ops).unwrap() - 5.0).abs() < 1e-15);
        assert!(eval(&u.ln(), &env, &ops).is_err());
    }

    #[test]
    fn real_roots() {
        assert!((pow_real(-8.0, &qr(1, 3)).unwrap() + 2.0).abs() < 1e-12);
        assert!(pow_real(-4.0, &qr(1, 2)).is_err());
        assert_eq!(pow_real(3.0, &q(2)).unwrap(), 9.0);
    }

    #[test]
    fn numeric_opaque_derivatives() {
        let sq = OpaqueImpl::numeric(|a| a[0] * a[0]);
        assert!((sq.call(&[1.5], &[1]).unwrap() - 3.0).abs() < 1e-6);
        let sym = OpaqueImpl::symbolic(vec![Var::Ut], Poly::var(Var::Ut).powi(2));
        assert_eq!(sym.call(&[1.0], &[0]).unwrap(), 1.0);
        assert_eq!(sym.call(&[1.5], &[1]).unwrap(), 3.0);
    }
}
