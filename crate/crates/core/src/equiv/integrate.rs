use num_traits::One;

use crate::expr::rational::q;
use crate::expr::{Atom, Func, Poly, Var};

/// `y = a v + b` with constant `a != 0`; returns `a`.
fn linear_slope(y: &Poly, v: Var) -> Option<Poly> {
    let cs = y.coefficients_in(v)?;
    if cs.len() != 2 || cs[1].depends_on(v) || cs[1].is_zero() {
        return None;
    }
    Some(cs[1].clone())
}

fn term_antiderivative(a: &Atom, e: &crate::expr::Q, v: Var) -> Option<Poly> {
    let vp = Poly::var(v);
    match a {
        Atom::Var(w) if *w == v => {
            if *e == -q(1) {
                Some(vp.apply(Func::Abs).ln())
            } else {
                let k = e + q(1);
                Some(vp.pow_q(&k).scale(&(q(1) / k)))
            }
        }
        Atom::Func(Func::Exp, y) => {
            let s = linear_slope(y, v)?.scale(e);
            Some(y.scale(e).exp().mul(&s.powi(-1)))
        }
        Atom::Func(f @ (Func::Sin | Func::Cos | Func::Sinh | Func::Cosh), y) if e.is_one() => {
            let s = linear_slope(y, v)?.powi(-1);
            let r = match f {
                Func::Sin => y.apply(Func::Cos).neg(),
                Func::Cos => y.apply(Func::Sin),
                Func::Sinh => y.apply(Func::Cosh),
                _ => y.apply(Func::Sinh),
            };
            Some(r.mul(&s))
        }
        Atom::Func(Func::Ln, y) if e.is_one() => {
            let plain = **y == vp || **y == vp.apply(Func::Abs);
            plain.then(|| vp.mul(&Poly::from_atom(a.clone())).sub(&vp))
        }
        _ => None,
    }
}

/// Antiderivative in `v` from a fixed table: constants, powers (with
/// `1/v` giving `ln|v|`), exponentials, sin, cos, sinh and cosh of linear
/// arguments, and `ln v`. Sums are integrated termwise.
pub fn antiderivative(p: &Poly, v: Var) -> Option<Poly> {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let dep: Vec<(&Atom, &crate::expr::Q)> = m
            .0
            .iter()
            .filter(|(a, _)| Poly::from_atom((*a).clone()).depends_on(v))
            .collect();
        let term = match dep.as_slice() {
            [] => Poly::from_term(m.clone(), c.clone()).mul(&Poly::var(v)),
            [(a, e)] => {
                let rest = Poly::from_term(m.without(a), c.clone());
                rest.mul(&term_antiderivative(a, e, v)?)
            }
            _ => return None,
        };
        out = out.add(&term);
    }
    Some(out)
}
