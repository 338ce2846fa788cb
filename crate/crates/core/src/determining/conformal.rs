use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::expr::rational::{is_integer, qr};
use crate::expr::zero::symbolic_zero;
use crate::expr::{diff, Atom, Monomial, Poly, Var};
use crate::jet::VectorField;

/// Parameters of a field of conformal shape in `x`; `xi^a` is
/// `2 g_b x_b x_a - g_a x_b x_b + s_ab x_b + beta x_a + alpha^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalAnsatz {
    pub gamma: Vec<Poly>,
    pub sigma: Vec<Vec<Poly>>,
    pub beta: Poly,
    pub alpha0: Poly,
    pub alpha: Vec<Poly>,
    pub alpha4: Poly,
}

type XPoly = BTreeMap<Vec<u32>, Poly>;

/// Splits `p` into coefficients of monomials in `x1..xn`; coefficients
/// must not involve `x`.
fn x_expand(p: &Poly, n: usize) -> Result<XPoly> {
    let mut out: XPoly = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = vec![0u32; n];
        let mut rest = m.clone();
        for (k, slot) in key.iter_mut().enumerate() {
            let atom = Atom::Var(Var::X(k as u8 + 1));
            let e = m.exponent(&atom);
            if !is_integer(&e) || e.is_negative() {
                return Err(offending(m, c));
            }
            *slot = e.to_integer().to_u32().ok_or_else(|| offending(m, c))?;
            rest = rest.without(&atom);
        }
        let depends = rest.0.keys().any(|a| {
            let ap = Poly::from_atom(a.clone());
            (1..=n).any(|k| ap.depends_on(Var::X(k as u8)))
        });
        if depends {
            return Err(offending(m, c));
        }
        let slot = out.entry(key).or_insert_with(Poly::zero);
        *slot = slot.add(&Poly::from_term(rest, c.clone()));
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn offending(m: &Monomial, c: &crate::expr::Q) -> Error {
    Error::NotConformalForm(Poly::from_term(m.clone(), c.clone()).to_string())
}

fn key(n: usize, idx: &[usize]) -> Vec<u32> {
    let mut k = vec![0u32; n];
    for i in idx {
        k[*i] += 1;
    }
    k
}

fn is_constant(p: &Poly) -> bool {
    p.free_vars().is_empty()
}

fn x_norm2(n: usize) -> Poly {
    (1..=n).fold(Poly::zero(), |s, a| s.add(&Poly::var(Var::X(a as u8)).powi(2)))
}

/// `xi0` and `eta` predicted from the spatial part and (A, B, C).
fn scalar_parts(an: &ConformalAnsatz, a: &Poly, b: &Poly, c: &Poly, n: usize) -> (Poly, Poly) {
    let half = qr(1, 2);
    let r2 = x_norm2(n);
    let dt = |p: &Poly| diff(p, Var::T);
    let du = |p: &Poly| diff(p, Var::U);
    let mut xi0 = a
        .mul(&dt(&an.beta))
        .sub(&b.mul(&du(&an.beta)).scale(&half))
        .mul(&r2)
        .scale(&half)
        .add(&an.alpha0);
    let mut eta = c
        .mul(&du(&an.beta))
        .sub(&b.mul(&dt(&an.beta)).scale(&half))
        .mul(&r2)
        .scale(&half)
        .add(&an.alpha4);
    for k in 0..n {
        let xk = Poly::var(Var::X(k as u8 + 1));
        let al = &an.alpha[k];
        xi0 = xi0.add(&a.mul(&dt(al)).sub(&b.mul(&du(al)).scale(&half)).mul(&xk));
        eta = eta.add(&c.mul(&du(al)).sub(&b.mul(&dt(al)).scale(&half)).mul(&xk));
    }
    (xi0, eta)
}

/// Builds the field described by an ansatz.
pub fn reconstruct(an: &ConformalAnsatz, a: &Poly, b: &Poly, c: &Poly) -> VectorField {
    let n = an.alpha.len();
    let xs: Vec<Poly> = (1..=n).map(|k| Poly::var(Var::X(k as u8))).collect();
    let gx = (0..n).fold(Poly::zero(), |s, k| s.add(&an.gamma[k].mul(&xs[k])));
    let r2 = x_norm2(n);
    let xi = (0..n)
        .map(|i| {
            let mut p = gx.mul(&xs[i]).scale(&crate::expr::rational::q(2)).sub(&an.gamma[i].mul(&r2));
            for k in 0..n {
                p = p.add(&an.sigma[i][k].mul(&xs[k]));
            }
            p.add(&an.beta.mul(&xs[i])).add(&an.alpha[i])
        })
        .collect();
    let (xi0, eta) = scalar_parts(an, a, b, c, n);
    VectorField::new(n, xi0, xi, eta)
}

/// Extracts the conformal parameters of `q`, failing with the first term
/// that does not fit.
pub fn conformal_form_check(q: &VectorField, a: &Poly, b: &Poly, c: &Poly) -> Result<ConformalAnsatz> {
    let n = q.n;
    let xs: Vec<XPoly> = q.xi.iter().map(|p| x_expand(p, n)).collect::<Result<_>>()?;
    let get = |i: usize, idx: &[usize]| xs[i].get(&key(n, idx)).cloned().unwrap_or_else(Poly::zero);
    let fail = |i: usize, idx: &[usize]| {
        let mut mono = Poly::one();
        for k in idx {
            mono = mono.mul(&Poly::var(Var::X(*k as u8 + 1)));
        }
        Error::NotConformalForm(format!("{}*@x{}", mono.mul(&get(i, idx)), i + 1))
    };
    for (i, m) in xs.iter().enumerate() {
        if let Some(k) = m.keys().find(|k| k.iter().sum::<u32>() > 2) {
            let idx: Vec<usize> = k
                .iter()
                .enumerate()
                .flat_map(|(v, e)| std::iter::repeat(v).take(*e as usize))
                .collect();
            return Err(fail(i, &idx));
        }
    }
    let gamma: Vec<Poly> = (0..n).map(|i| get(i, &[i, i])).collect();
    for i in 0..n {
        if !is_constant(&gamma[i]) {
            return Err(fail(i, &[i, i]));
        }
        for j in 0..n {
            for k in j..n {
                let expected = if j == k && j != i {
                    gamma[i].neg()
                } else if j == i && k == i {
                    gamma[i].clone()
                } else if j == i {
                    gamma[k].scale(&crate::expr::rational::q(2))
                } else if k == i {
                    gamma[j].scale(&crate::expr::rational::q(2))
                } else {
                    Poly::zero()
                };
                if get(i, &[j, k]) != expected {
                    return Err(fail(i, &[j, k]));
                }
            }
        }
    }
    let beta = get(0, &[0]);
    let mut sigma = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        if get(i, &[i]) != beta {
            return Err(fail(i, &[i]));
        }
        for k in 0..n {
            if k != i {
                let s = get(i, &[k]);
                if !is_constant(&s) || s.add(&get(k, &[i])) != Poly::zero() {
                    return Err(fail(i, &[k]));
                }
                sigma[i][k] = s;
            }
        }
    }
    let alpha: Vec<Poly> = (0..n).map(|i| get(i, &[])).collect();
    let alpha0 = x_expand(&q.xi0, n)?.remove(&vec![0; n]).unwrap_or_else(Poly::zero);
    let alpha4 = x_expand(&q.eta, n)?.remove(&vec![0; n]).unwrap_or_else(Poly::zero);
    let an = ConformalAnsatz {
        gamma,
        sigma,
        beta,
        alpha0,
        alpha,
        alpha4,
    };
    let (xi0, eta) = scalar_parts(&an, a, b, c, n);
    for (label, actual, predicted) in [("@t", &q.xi0, xi0), ("@u", &q.eta, eta)] {
        let d = actual.sub(&predicted);
        if !symbolic_zero(&d) {
            let first = d.terms().next().map(|(m, c)| Poly::from_term(m.clone(), c.clone()));
            return Err(Error::NotConformalForm(format!(
                "{}*{label}",
                first.unwrap_or_else(Poly::zero)
            )));
        }
    }
    Ok(an)
}
