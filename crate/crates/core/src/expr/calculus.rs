use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use super::poly::{monomial_poly, Atom, Func, Opaque, Poly, Var};
use super::rational::{q, Q};

/// Partial derivative with respect to a variable.
pub fn diff(p: &Poly, v: Var) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        for (a, e) in &m.0 {
            let da = diff_atom(a, v);
            if da.is_zero() {
                continue;
            }
            let mut rest = m.0.clone();
            *rest.get_mut(a).unwrap() -= Q::one();
            let term = monomial_poly(c * e, rest).mul(&da);
            out = out.add(&term);
        }
    }
    out
}

pub fn diff_n(p: &Poly, v: Var, k: usize) -> Poly {
    let mut out = p.clone();
    for _ in 0..k {
        out = diff(&out, v);
    }
    out
}

fn diff_atom(a: &Atom, v: Var) -> Poly {
    match a {
        Atom::Var(w) => {
            if *w == v {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Atom::Param(_) | Atom::Surd(_) => Poly::zero(),
        Atom::Func(f, y) => {
            let dy = diff(y, v);
            if dy.is_zero() {
                return Poly::zero();
            }
            let outer = match f {
                Func::Exp => y.exp(),
                Func::Ln => y.powi(-1),
                Func::Sin => y.apply(Func::Cos),
                Func::Cos => y.apply(Func::Sin).neg(),
                Func::Tan => Poly::one().add(&y.apply(Func::Tan).powi(2)),
                Func::Sinh => y.apply(Func::Cosh),
                Func::Cosh => y.apply(Func::Sinh),
                Func::Tanh => Poly::one().sub(&y.apply(Func::Tanh).powi(2)),
                Func::Atan => Poly::one().add(&y.powi(2)).powi(-1),
                Func::Abs => y.apply(Func::Sign),
                Func::Sign => Poly::zero(),
                Func::Sqrt => y.pow_q(&super::rational::qr(-1, 2)).scale(&super::rational::qr(1, 2)),
            };
            outer.mul(&dy)
        }
        Atom::Opaque(o) => {
            let mut out = Poly::zero();
            for (i, arg) in o.args.iter().enumerate() {
                let da = diff(arg, v);
                if da.is_zero() {
                    continue;
                }
                let mut d = o.derivs.clone();
                d[i] += 1;
                let f = Poly::from_atom(Atom::Opaque(Arc::new(Opaque {
                    name: o.name.clone(),
                    args: o.args.clone(),
                    derivs: d,
                })));
                out = out.add(&f.mul(&da));
            }
            out
        }
        Atom::Pow(b, m) => {
            let db = diff(b, v);
            let dm = diff(m, v);
            if db.is_zero() && dm.is_zero() {
                return Poly::zero();
            }
            let whole = Poly::from_atom(a.clone());
            let inner = dm.mul(&b.ln()).add(&m.mul(&db).mul(&b.powi(-1)));
            whole.mul(&inner)
        }
        Atom::Root(b) => diff(b, v),
    }
}

/// Rebuilds `p` with every atom for which `f` returns a replacement swapped
/// out; replacements are applied recursively inside function arguments.
pub fn map_atoms(p: &Poly, f: &dyn Fn(&Atom) -> Option<Poly>) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::constant(c.clone());
        let mut untouched: BTreeMap<Atom, Q> = BTreeMap::new();
        for (a, e) in &m.0 {
            match rebuild_atom(a, e, f) {
                Some(r) => term = term.mul(&r),
                None => {
                    untouched.insert(a.clone(), e.clone());
                }
            }
        }
        if !untouched.is_empty() {
            term = term.mul(&monomial_poly(q(1), untouched));
        }
        out = out.add(&term);
    }
    out
}

/// Returns `None` when the atom is unchanged.
fn rebuild_atom(a: &Atom, e: &Q, f: &dyn Fn(&Atom) -> Option<Poly>) -> Option<Poly> {
    if let Some(r) = f(a) {
        return Some(r.pow_q(e));
    }
    match a {
        Atom::Var(_) | Atom::Param(_) | Atom::Surd(_) => None,
        Atom::Func(func, y) => {
            let y2 = map_atoms(y, f);
            if &y2 == y.as_ref() {
                return None;
            }
            if *func == Func::Exp {
                return Some(y2.scale(e).exp());
            }
            Some(y2.apply(*func).pow_q(e))
        }
        Atom::Opaque(o) => {
            let args: Vec<Poly> = o.args.iter().map(|x| map_atoms(x, f)).collect();
            if args == o.args {
                return None;
            }
            let na = Atom::Opaque(Arc::new(Opaque {
                name: o.name.clone(),
                args,
                derivs: o.derivs.clone(),
            }));
            Some(monomial_poly(q(1), [(na, e.clone())].into()))
        }
        Atom::Pow(b, m) => {
            let b2 = map_atoms(b, f);
            let m2 = map_atoms(m, f);
            if &b2 == b.as_ref() && &m2 == m.as_ref() {
                return None;
            }
            Some(b2.pow_poly(&m2.scale(e)))
        }
        Atom::Root(b) => {
            let b2 = map_atoms(b, f);
            if &b2 == b.as_ref() {
                return None;
            }
            Some(b2.pow_q(e))
        }
    }
}

/// Simultaneous substitution of variables.
pub fn substitute(p: &Poly, bindings: &BTreeMap<Var, Poly>) -> Poly {
    if bindings.is_empty() {
        return p.clone();
    }
    map_atoms(p, &|a| match a {
        Atom::Var(v) => bindings.get(v).cloned(),
        _ => None,
    })
}

pub fn substitute_var(p: &Poly, v: Var, by: &Poly) -> Poly {
    let mut b = BTreeMap::new();
    b.insert(v, by.clone());
    substitute(p, &b)
}

/// Replaces named parameters.
pub fn substitute_params(p: &Poly, bindings: &BTreeMap<String, Poly>) -> Poly {
    if bindings.is_empty() {
        return p.clone();
    }
    map_atoms(p, &|a| match a {
        Atom::Param(par) => bindings.get(par.name.as_ref()).cloned(),
        _ => None,
    })
}

/// Replaces applications of an opaque symbol by a concrete body written in
/// terms of the formal argument variables; derivatives are taken
/// symbolically.
pub fn instantiate_opaque(p: &Poly, name: &str, formals: &[Var], body: &Poly) -> Poly {
    map_atoms(p, &|a| match a {
        Atom::Opaque(o) if o.name.as_ref() == name && o.args.len() == formals.len() => {
            let mut d = body.clone();
            for (i, k) in o.derivs.iter().enumerate() {
                d = diff_n(&d, formals[i], *k as usize);
            }
            // simultaneous substitution of actual args for formals
            let mut b = BTreeMap::new();
            for (i, v) in formals.iter().enumerate() {
                b.insert(*v, o.args[i].clone());
            }
            Some(substitute(&d, &b))
        }
        _ => None,
    })
}
