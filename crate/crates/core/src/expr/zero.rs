//! Layered zero test: canonical form, identity rewriting, numeric probes.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::calculus::map_atoms;
use super::eval::{eval_scaled, Env, OpaqueImpl, OpaqueTable};
use super::poly::{monomial_poly, Atom, Func, Poly, Sign, Var};
use super::rational::{is_integer, q, qr, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub env: Env,
    /// Index into the opaque probe family used at this point.
    pub probe: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Zero,
    NonZero(Witness),
    Unknown,
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, Verdict::NonZero(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Zero => "Zero",
            Verdict::NonZero(_) => "NonZero",
            Verdict::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZeroConfig {
    /// Relative tolerance against the magnitude of the summed terms.
    pub tol: f64,
    pub points: usize,
    pub seed: u64,
    /// Half-width of the probe box.
    pub radius: f64,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        ZeroConfig {
            tol: 1e-9,
            points: 16,
            seed: 0x5eed,
            radius: 2.0,
        }
    }
}

const MAX_BRANCH_ATOMS: usize = 5;

pub fn is_zero(p: &Poly) -> Verdict {
    is_zero_with(p, &ZeroConfig::default())
}

pub fn is_zero_with(p: &Poly, cfg: &ZeroConfig) -> Verdict {
    if p.is_zero() || symbolic_zero(p) {
        return Verdict::Zero;
    }
    probe(p, cfg)
}

/// True when the identity layers reduce `p` to zero on every sign branch.
pub fn symbolic_zero(p: &Poly) -> bool {
    if p.is_zero() {
        return true;
    }
    let sign_atoms = branch_atoms(p);
    if sign_atoms.is_empty() || sign_atoms.len() > MAX_BRANCH_ATOMS {
        return zero_form(p).is_zero();
    }
    let k = sign_atoms.len();
    (0..(1u32 << k)).all(|mask| {
        let signs: BTreeMap<Poly, i64> = sign_atoms
            .iter()
            .enumerate()
            .map(|(i, y)| (y.clone(), if mask >> i & 1 == 1 { -1 } else { 1 }))
            .collect();
        let b = apply_branch(p, &signs);
        b.is_zero() || zero_form(&b).is_zero()
    })
}

/// Arguments of abs/sign atoms anywhere in `p`.
fn branch_atoms(p: &Poly) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    p.visit_atoms(&mut |a| {
        if let Atom::Func(Func::Abs | Func::Sign, y) = a {
            if !out.contains(y) {
                out.push((**y).clone());
            }
        }
    });
    out
}

fn apply_branch(p: &Poly, signs: &BTreeMap<Poly, i64>) -> Poly {
    map_atoms(p, &|a| match a {
        Atom::Func(Func::Abs, y) => signs.get(y).map(|s| {
            let y2 = apply_branch(y, signs);
            y2.scale(&q(*s))
        }),
        Atom::Func(Func::Sign, y) => signs.get(y).map(|s| Poly::int(*s)),
        _ => None,
    })
}

/// Rewrites into a form where the fixed identity table reduces to
/// structural cancellation: tan and tanh go through sin/cos and sinh/cosh,
/// hyperbolic functions become exponentials, denominators are cleared and
/// even sine powers are traded for cosines.
pub fn zero_form(p: &Poly) -> Poly {
    let mut r = rewrite_functions(p);
    for _ in 0..4 {
        let cleared = clear_denominators(&r);
        let reduced = reduce_sin_squares(&cleared);
        if reduced == r {
            break;
        }
        r = reduced;
    }
    r
}

/// The rewriting part of [`zero_form`] without clearing denominators, so
/// that several polynomials can share one multiplier.
pub fn trig_normal(p: &Poly) -> Poly {
    reduce_sin_squares(&rewrite_functions(p))
}

fn rewrite_functions(p: &Poly) -> Poly {
    map_atoms(p, &|a| match a {
        Atom::Func(f @ (Func::Tan | Func::Tanh | Func::Sinh | Func::Cosh), y) => {
            let y = rewrite_functions(y);
            let ep = y.exp();
            let em = y.neg().exp();
            let half = qr(1, 2);
            Some(match f {
                Func::Sinh => ep.sub(&em).scale(&half),
                Func::Cosh => ep.add(&em).scale(&half),
                Func::Tanh => ep.sub(&em).mul(&ep.add(&em).powi(-1)),
                _ => y.apply(Func::Sin).mul(&y.apply(Func::Cos).powi(-1)),
            })
        }
        _ => None,
    })
}

/// Multiplies through by the atoms that carry negative exponents in some
/// term, so that rational combinations share one denominator.
pub fn clear_denominators(p: &Poly) -> Poly {
    let mut mins: BTreeMap<Atom, Q> = BTreeMap::new();
    for (m, _) in p.terms() {
        for (a, e) in &m.0 {
            if e.is_negative() {
                let slot = mins.entry(a.clone()).or_insert_with(Q::zero);
                if e < slot {
                    *slot = e.clone();
                }
            }
        }
    }
    if mins.is_empty() {
        return p.clone();
    }
    let factor: BTreeMap<Atom, Q> = mins.into_iter().map(|(a, e)| (a, -e)).collect();
    p.mul_exps(&factor)
}

fn reduce_sin_squares(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let hit = m.0.iter().find(|(a, e)| {
            matches!(a, Atom::Func(Func::Sin, _)) && is_integer(e) && *e >= &q(2)
        });
        match hit {
            Some((Atom::Func(_, y), e)) => {
                let a = Atom::Func(Func::Sin, y.clone());
                let mut rest = m.0.clone();
                rest.insert(a, e - q(2));
                let cos2 = y.apply(Func::Cos).powi(2);
                let t = monomial_poly(c.clone(), rest).mul(&Poly::one().sub(&cos2));
                out = out.add(&reduce_sin_squares(&t));
            }
            _ => out = out.add(&Poly::from_term(m.clone(), c.clone())),
        }
    }
    out
}

/// Opaque stand-ins: index `k` picks one instance per declared arity.
pub fn probe_instance(name_index: usize, arity: usize, k: usize) -> OpaqueImpl {
    let a = Poly::var(Var::X(1));
    let b = Poly::var(Var::X(2));
    let c = Poly::var(Var::X(3));
    let fam: Vec<Poly> = match arity {
        1 => vec![a.powi(2), a.powi(3), a.exp().add(&a.powi(4))],
        2 => vec![
            a.mul(&b),
            a.powi(2).add(&b.powi(2)),
            a.exp().add(&b.powi(3)),
        ],
        _ => vec![
            a.add(&b.mul(&c)),
            a.powi(2).add(&b.powi(2)).add(&c.powi(2)),
            a.exp().mul(&b).add(&c.powi(3)),
        ],
    };
    let body = fam[(k + name_index) % fam.len()].clone();
    let formals = [Var::X(1), Var::X(2), Var::X(3), Var::X(4), Var::X(5)];
    OpaqueImpl::symbolic(formals[..arity.max(1)].to_vec(), body)
}

pub const PROBE_VARIANTS: usize = 3;

/// Opaque tables for each probe variant, covering every opaque in `p`.
pub fn probe_tables(p: &Poly) -> Vec<OpaqueTable> {
    probe_tables_all(&[p])
}

pub fn probe_tables_all(ps: &[&Poly]) -> Vec<OpaqueTable> {
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for p in ps {
        p.visit_atoms(&mut |a| {
            if let Atom::Opaque(o) = a {
                arities.insert(o.name.to_string(), o.args.len());
            }
        });
    }
    (0..PROBE_VARIANTS)
        .map(|k| {
            arities
                .iter()
                .enumerate()
                .map(|(i, (n, ar))| (n.clone(), probe_instance(i, *ar, k)))
                .collect()
        })
        .collect()
}

pub fn random_env(p: &Poly, rng: &mut impl Rng, radius: f64) -> Env {
    let mut env = Env::new();
    for v in p.free_vars() {
        env.set(v, rng.gen_range(-radius..radius));
    }
    for par in p.params() {
        let x = match par.sign {
            Sign::Any => rng.gen_range(-radius..radius),
            Sign::Positive => rng.gen_range(0.2..radius),
            Sign::Negative => -rng.gen_range(0.2..radius),
        };
        env.params.insert(par.name.to_string(), x);
    }
    env
}

fn probe(p: &Poly, cfg: &ZeroConfig) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tables = probe_tables(p);
    for _ in 0..cfg.points {
        let env = random_env(p, &mut rng, cfg.radius);
        for (ti, ops) in tables.iter().enumerate() {
            if let Ok((v, scale)) = eval_scaled(p, &env, ops) {
                if v.abs() > cfg.tol * scale.max(1.0) {
                    return Verdict::NonZero(Witness {
                        env,
                        probe: ti,
                        value: v,
                    });
                }
            }
        }
    }
    Verdict::Unknown
}

/// Integer exponent helper for callers inspecting monomials.
pub fn int_exponent(e: &Q) -> Option<i64> {
    if is_integer(e) {
        e.to_integer().to_i64()
    } else {
        None
    }
}
