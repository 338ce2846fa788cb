//! Exact symbolic expressions.
//!
//! [`Expr`] is the exchange tree; [`Poly`] is the canonical form every
//! operation works on internally. Converting an `Expr` to `Poly` and back is
//! normalization.

pub mod calculus;
pub mod eval;
pub mod poly;
pub mod rational;
pub mod zero;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

pub use calculus::{diff, diff_n, instantiate_opaque, map_atoms, substitute_params, substitute_var};
pub use eval::{pow_real, Env, OpaqueImpl, OpaqueTable};
pub use poly::{Atom, Func, Monomial, Opaque, Param, Poly, Sign, Var};
pub use rational::Q;
pub use zero::{is_zero_with, symbolic_zero, zero_form, Verdict, Witness, ZeroConfig};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Rational(Q),
    Parameter(Param),
    Variable(Var),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
    Opaque {
        name: Arc<str>,
        args: Vec<Expr>,
        derivs: Vec<u32>,
    },
}

impl Expr {
    pub fn to_poly(&self) -> Poly {
        match self {
            Expr::Rational(c) => Poly::constant(c.clone()),
            Expr::Parameter(p) => Poly::from_atom(Atom::Param(p.clone())),
            Expr::Variable(v) => Poly::var(*v),
            Expr::Sum(xs) => xs.iter().fold(Poly::zero(), |acc, x| acc.add(&x.to_poly())),
            Expr::Product(xs) => xs.iter().fold(Poly::one(), |acc, x| acc.mul(&x.to_poly())),
            Expr::Power(b, e) => b.to_poly().pow_poly(&e.to_poly()),
            Expr::Apply(f, x) => x.to_poly().apply(*f),
            Expr::Opaque { name, args, derivs } => Poly::from_atom(Atom::Opaque(Arc::new(Opaque {
                name: name.clone(),
                args: args.iter().map(Expr::to_poly).collect(),
                derivs: derivs.clone(),
            }))),
        }
    }

    /// The canonical tree for a canonical polynomial. Terms appear in
    /// descending monomial order, so a constant term comes last.
    pub fn from_poly(p: &Poly) -> Expr {
        let mut terms: Vec<Expr> = p.terms().rev().map(|(m, c)| term_expr(m, c)).collect();
        match terms.len() {
            0 => Expr::Rational(Q::from_integer(0.into())),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn var(v: Var) -> Expr {
        Expr::Variable(v)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rational(rational::q(n))
    }
}

fn term_expr(m: &Monomial, c: &Q) -> Expr {
    let mut factors: Vec<Expr> = m.0.iter().map(|(a, e)| factor_expr(a, e)).collect();
    if factors.is_empty() {
        return Expr::Rational(c.clone());
    }
    if !c.is_one() {
        factors.insert(0, Expr::Rational(c.clone()));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Product(factors)
    }
}

fn factor_expr(a: &Atom, e: &Q) -> Expr {
    let lit = |x: &Q| Box::new(Expr::Rational(x.clone()));
    match a {
        Atom::Func(Func::Exp, y) => Expr::Apply(Func::Exp, Box::new(Expr::from_poly(&y.scale(e)))),
        Atom::Surd(p) => Expr::Power(lit(p), lit(e)),
        Atom::Pow(b, m) => Expr::Power(
            Box::new(Expr::from_poly(b)),
            Box::new(Expr::from_poly(&m.scale(e))),
        ),
        Atom::Root(b) => Expr::Power(Box::new(Expr::from_poly(b)), lit(e)),
        _ => {
            let base = atom_expr(a);
            if e.is_one() {
                base
            } else {
                Expr::Power(Box::new(base), lit(e))
            }
        }
    }
}

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Var(v) => Expr::Variable(*v),
        Atom::Param(p) => Expr::Parameter(p.clone()),
        Atom::Func(f, y) => Expr::Apply(*f, Box::new(Expr::from_poly(y))),
        Atom::Opaque(o) => Expr::Opaque {
            name: o.name.clone(),
            args: o.args.iter().map(Expr::from_poly).collect(),
            derivs: o.derivs.clone(),
        },
        Atom::Surd(_) | Atom::Pow(..) | Atom::Root(_) => factor_expr(a, &Q::one()),
    }
}

impl From<&Poly> for Expr {
    fn from(p: &Poly) -> Expr {
        Expr::from_poly(p)
    }
}

/// Declared opaque symbol: its name and formal argument variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpaqueDecl {
    pub name: String,
    pub formals: Vec<Var>,
}

impl OpaqueDecl {
    pub fn arity(&self) -> usize {
        self.formals.len()
    }
}

/// Symbol table for opaque functions and parameters.
#[derive(Clone, Debug, Default)]
pub struct Session {
    opaques: BTreeMap<String, OpaqueDecl>,
    params: BTreeMap<String, Sign>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_opaque(&mut self, name: &str, formals: &[Var]) -> Result<()> {
        if let Some(d) = self.opaques.get(name) {
            if d.formals == formals {
                return Ok(());
            }
            return Err(Error::Config(format!("opaque symbol {name} redeclared")));
        }
        if self.params.contains_key(name) {
            return Err(Error::Config(format!("{name} already declared as a parameter")));
        }
        for f in formals {
            if !matches!(f, Var::T | Var::U | Var::Ut) {
                return Err(Error::Config(format!(
                    "formal argument {} of {name} must be one of t, u, ut",
                    f.name()
                )));
            }
        }
        self.opaques.insert(
            name.to_string(),
            OpaqueDecl {
                name: name.to_string(),
                formals: formals.to_vec(),
            },
        );
        Ok(())
    }

    pub fn declare_param(&mut self, name: &str, sign: Sign) -> Result<()> {
        if self.opaques.contains_key(name) {
            return Err(Error::Config(format!("{name} already declared as an opaque symbol")));
        }
        self.params.insert(name.to_string(), sign);
        Ok(())
    }

    pub fn opaque(&self, name: &str) -> Option<&OpaqueDecl> {
        self.opaques.get(name)
    }

    pub fn opaques(&self) -> impl Iterator<Item = &OpaqueDecl> {
        self.opaques.values()
    }

    pub fn param(&self, name: &str) -> Option<Sign> {
        self.params.get(name).copied()
    }

    pub fn params(&self) -> impl Iterator<Item = (&String, &Sign)> {
        self.params.iter()
    }

    /// Every opaque symbol in `p` must be declared with matching arity.
    pub fn check(&self, p: &Poly) -> Result<()> {
        let mut err = None;
        p.visit_atoms(&mut |a| {
            if let Atom::Opaque(o) = a {
                match self.opaques.get(o.name.as_ref()) {
                    Some(d) if d.arity() == o.args.len() => {}
                    _ => {
                        if err.is_none() {
                            err = Some(Error::UndeclaredSymbol(o.name.to_string()));
                        }
                    }
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn differentiate(&self, p: &Poly, v: Var) -> Result<Poly> {
        self.check(p)?;
        Ok(diff(p, v))
    }
}

/// Canonical form of an expression tree.
pub fn normalize(e: &Expr) -> Expr {
    let p = e.to_poly();
    if !p.is_zero() && symbolic_zero(&p) {
        return Expr::int(0);
    }
    Expr::from_poly(&p)
}

pub fn differentiate(e: &Expr, v: Var, session: &Session) -> Result<Expr> {
    Ok(Expr::from_poly(&session.differentiate(&e.to_poly(), v)?))
}

pub fn substitute(e: &Expr, bindings: &BTreeMap<Var, Expr>) -> Expr {
    let b: BTreeMap<Var, Poly> = bindings.iter().map(|(k, v)| (*k, v.to_poly())).collect();
    Expr::from_poly(&calculus::substitute(&e.to_poly(), &b))
}

pub fn is_zero(e: &Expr) -> Verdict {
    zero::is_zero(&e.to_poly())
}

pub fn eval(e: &Expr, env: &Env, ops: &OpaqueTable) -> Result<f64> {
    eval::eval(&e.to_poly(), env, ops)
}

/// Convenience constructor for an opaque application with no derivatives.
pub fn opaque_app(name: &str, args: Vec<Poly>) -> Poly {
    let k = args.len();
    Poly::from_atom(Atom::Opaque(Arc::new(Opaque {
        name: name.into(),
        args,
        derivs: vec![0; k],
    })))
}
