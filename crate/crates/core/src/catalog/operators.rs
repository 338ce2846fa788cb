use super::{check_constraints, CaseParams};
use crate::error::{Error, Result};
use crate::expr::rational::q;
use crate::expr::{Func, Poly, Var};
use crate::jet::VectorField;

/// Polynomial instances in `u` of the arbitrary functions of row 7;
/// index 0 is the time direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Case7Params {
    pub c: [Poly; 4],
    /// Must be antisymmetric.
    pub b: [[Poly; 4]; 4],
    pub d: Poly,
    pub a: [Poly; 4],
    pub eta: Poly,
}

impl Case7Params {
    pub fn zero() -> Self {
        Case7Params {
            c: std::array::from_fn(|_| Poly::zero()),
            b: std::array::from_fn(|_| std::array::from_fn(|_| Poly::zero())),
            d: Poly::zero(),
            a: std::array::from_fn(|_| Poly::zero()),
            eta: Poly::zero(),
        }
    }

    pub fn constant_c0() -> Self {
        let mut p = Self::zero();
        p.c[0] = Poly::one();
        p
    }

    pub fn linear_c0() -> Self {
        let mut p = Self::zero();
        p.c[0] = Poly::var(Var::U);
        p
    }

    fn check(&self) -> Result<()> {
        let mut all: Vec<&Poly> = self.c.iter().chain(self.a.iter()).collect();
        all.push(&self.d);
        all.push(&self.eta);
        all.extend(self.b.iter().flatten());
        if all.iter().any(|p| p.free_vars().iter().any(|v| *v != Var::U)) {
            return Err(Error::ConstraintViolation("row 7 functions must depend on u only".into()));
        }
        for m in 0..4 {
            for k in 0..4 {
                if self.b[m][k] != self.b[k][m].neg() {
                    return Err(Error::ConstraintViolation(format!("b[{m}][{k}] must equal -b[{k}][m]")));
                }
            }
        }
        Ok(())
    }
}

const METRIC: [i64; 4] = [1, -1, -1, -1];

fn coord(k: usize) -> Poly {
    if k == 0 {
        Poly::var(Var::T)
    } else {
        Poly::var(Var::X(k as u8))
    }
}

/// The general row-7 field for `n = 3`.
pub fn case7_field(p: &Case7Params) -> Result<VectorField> {
    p.check()?;
    let x: Vec<Poly> = (0..4).map(coord).collect();
    let g = |m: usize| Poly::int(METRIC[m]);
    let gcx = (0..4).fold(Poly::zero(), |s, m| s.add(&g(m).mul(&p.c[m]).mul(&x[m])));
    let gxx = (0..4).fold(Poly::zero(), |s, m| s.add(&g(m).mul(&x[m].powi(2))));
    let comp: Vec<Poly> = (0..4)
        .map(|k| {
            let mut c = gcx.mul(&x[k]).scale(&q(2)).sub(&p.c[k].mul(&gxx));
            for m in 0..4 {
                c = c.add(&g(m).mul(&p.b[m][k]).mul(&x[m]));
            }
            c.add(&p.d.mul(&x[k])).add(&p.a[k])
        })
        .collect();
    Ok(VectorField::new(3, comp[0].clone(), comp[1..].to_vec(), p.eta.clone()))
}

fn x(a: usize) -> Poly {
    Poly::var(Var::X(a as u8))
}

fn field(n: usize, xi0: Poly, xi: impl Fn(usize) -> Poly, eta: Poly) -> VectorField {
    VectorField::new(n, xi0, (1..=n).map(xi).collect(), eta)
}

fn dilation(n: usize, k: &Poly) -> VectorField {
    field(n, Poly::zero(), |a| k.mul(&x(a)), Poly::zero())
}

fn d_op(n: usize) -> VectorField {
    field(n, Poly::var(Var::T), x, Poly::var(Var::U))
}

pub fn kernel(n: usize) -> Vec<VectorField> {
    let mut out: Vec<VectorField> = (1..=n).map(|a| VectorField::dx(n, a)).collect();
    for a in 1..=n {
        for b in a + 1..=n {
            out.push(VectorField::rotation(n, a, b));
        }
    }
    out
}

/// The operators of a row; row 0 gives the kernel, row 7 the single
/// field built from the row-7 parameters.
pub fn case_operators(id: usize, n: usize, p: &CaseParams) -> Result<Vec<VectorField>> {
    check_constraints(id, p)?;
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if id == 7 {
        if n != 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        return Ok(vec![case7_field(&p.case7)?]);
    }
    let t = Poly::var(Var::T);
    let u = Poly::var(Var::U);
    let dt = VectorField::dt(n);
    let du = VectorField::du(n);
    let mut ops = kernel(n);
    let pq = |v: i64| Poly::int(v);
    match id {
        0 => {}
        1 => ops.push(field(n, pq(2), |a| x(a).scale(&-p.delta.clone()), Poly::zero())),
        2 => ops.extend([dt, field(n, Poly::zero(), |a| x(a).neg(), pq(2))]),
        3 => ops.extend([
            dt,
            field(n, t.scale(&q(2)), |a| x(a).scale(&p.delta), u.scale(&q(2))),
        ]),
        4 => ops.extend([dt, du, d_op(n)]),
        5 => ops.extend([dt, du, d_op(n), field(n, Poly::zero(), x, t.scale(&q(-2)))]),
        6 => {
            let k = Poly::constant(p.beta.clone() - q(2));
            let mut last = dilation(n, &k);
            last.eta = u.scale(&q(-2));
            ops.extend([dt, du, d_op(n), last]);
        }
        8 => {
            let (e1, e2) = (pq(p.eps1), pq(p.eps2));
            let r2 = (1..=n).fold(Poly::zero(), |s, a| s.add(&x(a).powi(2)));
            let s2 = r2.sub(&e1.mul(&u.powi(2))).sub(&e2.mul(&t.powi(2)));
            let d = d_op(n);
            ops.extend([dt.clone(), du.clone(), d.clone()]);
            for a in 1..=n {
                let mut j = VectorField::zero(n);
                j.xi[a - 1] = u.clone();
                j.eta = e1.mul(&x(a));
                ops.push(j);
            }
            for a in 1..=n {
                let mut j = VectorField::zero(n);
                j.xi[a - 1] = t.clone();
                j.xi0 = e2.mul(&x(a));
                ops.push(j);
            }
            ops.push(field(n, u.clone(), |_| Poly::zero(), e1.mul(&e2).mul(&t).neg()));
            for a in 1..=n {
                let k = d.scale(&x(a).scale(&q(2))).sub(&VectorField::dx(n, a).scale(&s2));
                ops.push(k);
            }
            ops.push(d.scale(&u.scale(&q(2))).add(&du.scale(&e1.mul(&s2))));
            ops.push(d.scale(&t.scale(&q(2))).add(&dt.scale(&e2.mul(&s2))));
        }
        9 => {
            let e12 = pq(p.eps1 * p.eps2);
            ops.extend([
                dt,
                field(n, t.clone(), |_| Poly::zero(), pq(2)),
                field(
                    n,
                    t.powi(2).sub(&e12.mul(&u.exp()).scale(&q(4))),
                    |_| Poly::zero(),
                    t.scale(&q(4)),
                ),
            ]);
        }
        10 | 11 | 12 => {
            let (c, s, ta, sgn) = match id {
                10 => (Func::Cos, Func::Sin, u.apply(Func::Tan), [-1, 1]),
                11 => (Func::Cosh, Func::Sinh, u.apply(Func::Tan), [1, 1]),
                _ => (Func::Cosh, Func::Sinh, u.apply(Func::Tanh), [-1, -1]),
            };
            let (ct, st) = (t.apply(c), t.apply(s));
            ops.push(dt);
            ops.push(field(n, ct.mul(&ta), |_| Poly::zero(), st.scale(&q(sgn[0]))));
            ops.push(field(n, st.mul(&ta), |_| Poly::zero(), ct.scale(&q(sgn[1]))));
        }
        _ => return Err(Error::IndexOutOfRange(format!("case {id}"))),
    }
    Ok(ops)
}
