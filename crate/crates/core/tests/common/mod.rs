#![allow(dead_code)]

use eikonal_core::expr::rational::qr;
use eikonal_core::expr::{opaque_app, Env, Func, Poly, Var};
use rand::Rng;

pub const VARS: [Var; 3] = [Var::T, Var::U, Var::Ut];

fn leaf(rng: &mut impl Rng) -> Poly {
    match rng.gen_range(0..5) {
        0 => Poly::int(rng.gen_range(-3..=3)),
        1 => Poly::constant(qr(rng.gen_range(-5..=5), rng.gen_range(1..=4))),
        _ => Poly::var(VARS[rng.gen_range(0..3)]),
    }
}

/// A random elementary expression in t, u, ut that is finite and smooth
/// on the box `[-1, 1]^3`, with at most `MAX_TERMS` terms.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Poly {
    loop {
        let p = build(rng, depth);
        if p.len() <= MAX_TERMS {
            return p;
        }
    }
}

pub const MAX_TERMS: usize = 8;

fn build(rng: &mut impl Rng, depth: u32) -> Poly {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let random_expr = build;
    let a = build(rng, depth - 1);
    match rng.gen_range(0..11) {
        0 | 1 => a.add(&random_expr(rng, depth - 1)),
        2 | 3 => a.mul(&random_expr(rng, depth - 1)),
        4 => a.sub(&random_expr(rng, depth - 1)),
        5 => a.powi(if a.len() > 2 { 2 } else { 3 }),
        6 => a.apply([Func::Sin, Func::Cos, Func::Atan, Func::Tanh][rng.gen_range(0..4)]),
        7 => a.scale(&qr(1, 4)).apply(Func::Exp),
        8 => a.powi(2).add(&Poly::one()).ln(),
        9 => a.powi(2).add(&Poly::int(2)).pow_q(&qr(rng.gen_range(-3..=3) * 2 + 1, 2)),
        _ => a.powi(2).add(&Poly::one()).powi(-1),
    }
}

/// Like `random_expr` with an occasional opaque factor `h(ut)` or `f(u, ut)`.
pub fn random_rhs_part(rng: &mut impl Rng, depth: u32) -> Poly {
    let e = random_expr(rng, depth);
    match rng.gen_range(0..3) {
        0 => e.mul(&opaque_app("h", vec![Poly::var(Var::Ut)])),
        1 => e.add(&opaque_app("f", vec![Poly::var(Var::U), Poly::var(Var::Ut)])),
        _ => e,
    }
}

pub fn random_point(rng: &mut impl Rng) -> Env {
    let mut env = Env::new();
    for v in VARS {
        env.set(v, rng.gen_range(-1.0..1.0));
    }
    env
}

/// A random unnormalized tree over the same building blocks.
pub fn random_tree(rng: &mut impl Rng, depth: u32) -> eikonal_core::expr::Expr {
    use eikonal_core::expr::Expr;
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => Expr::Rational(qr(rng.gen_range(-4..=4), rng.gen_range(1..=3))),
            _ => Expr::Variable(VARS[rng.gen_range(0..3)]),
        };
    }
    let kids = |k: usize, rng: &mut _| (0..k).map(|_| random_tree(rng, depth - 1)).collect::<Vec<_>>();
    match rng.gen_range(0..5) {
        0 => Expr::Sum(kids(rng.gen_range(2..4), rng)),
        1 => Expr::Product(kids(2, rng)),
        2 => Expr::Power(Box::new(random_tree(rng, depth - 1)), Box::new(Expr::int(rng.gen_range(0..3)))),
        3 => Expr::Apply([Func::Sin, Func::Exp, Func::Atan][rng.gen_range(0..3)], Box::new(random_tree(rng, depth - 1))),
        _ => Expr::Sum(vec![random_tree(rng, depth - 1), Expr::Product(vec![Expr::int(-1), random_tree(rng, depth - 1)])]),
    }
}

/// A random field on (t, x1, x2, u) whose components are small
/// polynomials with an occasional elementary factor.
pub fn random_field(rng: &mut impl Rng, n: usize) -> eikonal_core::jet::VectorField {
    let comp = |rng: &mut _| random_component(rng, n);
    let xi0 = comp(rng);
    let xi = (0..n).map(|_| comp(rng)).collect();
    let eta = comp(rng);
    eikonal_core::jet::VectorField::new(n, xi0, xi, eta)
}

fn random_component(rng: &mut impl Rng, n: usize) -> Poly {
    let mut vars = vec![Var::T, Var::U];
    vars.extend((1..=n.min(3)).map(|a| Var::X(a as u8)));
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..4) {
        let mut m = Poly::int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..3) {
            m = m.mul(&Poly::var(vars[rng.gen_range(0..vars.len())]));
        }
        if rng.gen_bool(0.2) {
            m = m.mul(&Poly::var(vars[rng.gen_range(0..vars.len())]).apply(Func::Sin));
        }
        p = p.add(&m);
    }
    p
}
