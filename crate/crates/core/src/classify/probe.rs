//! Three-valued decision helpers shared by the classifier paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::calculus::substitute;
use crate::expr::eval::eval;
use crate::expr::rational::{q, qr, rationalize, to_f64};
use crate::expr::zero::{is_zero, probe_tables, random_env};
use crate::expr::{diff, Poly, Var, Verdict};

/// Collects whether any decision rested on numeric evidence only.
#[derive(Clone, Debug, Default)]
pub struct Tracker {
    pub numeric: bool,
    pub notes: Vec<String>,
}

impl Tracker {
    pub fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }
}

const POINTS: usize = 24;

/// Values of `p` at seeded random points where it evaluates.
fn samples(p: &Poly, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = probe_tables(p).swap_remove(0);
    let mut out = Vec::new();
    for _ in 0..POINTS * 4 {
        let env = random_env(p, &mut rng, 2.0);
        if let Ok(v) = eval(p, &env, &ops) {
            if v.is_finite() {
                out.push(v);
                if out.len() == POINTS {
                    break;
                }
            }
        }
    }
    out
}

/// Whether `p` vanishes identically. An unproved but numerically zero
/// answer marks the tracker; no evaluable point at all is inconclusive.
pub fn vanishes(p: &Poly, what: &str, tr: &mut Tracker) -> Result<bool> {
    match is_zero(p) {
        Verdict::Zero => Ok(true),
        Verdict::NonZero(_) => Ok(false),
        Verdict::Unknown => {
            if samples(p, 7).is_empty() {
                return Err(Error::Inconclusive(format!("{what}: no evaluable sample point")));
            }
            tr.numeric = true;
            tr.note(format!("{what}: zero numerically but not symbolically"));
            Ok(true)
        }
    }
}

/// The constant value of `p` if it has one.
pub fn constant_of(p: &Poly, what: &str, tr: &mut Tracker) -> Result<Option<Poly>> {
    let vars = p.free_vars();
    if vars.is_empty() {
        return Ok(Some(p.clone()));
    }
    for v in &vars {
        if !vanishes(&diff(p, *v), &format!("d/d{} of {what}", v.name()), tr)? {
            return Ok(None);
        }
    }
    let mut candidates = Vec::new();
    if p.params().is_empty() {
        if let Some(x) = samples(p, 11).first() {
            if let Some(c) = rationalize(*x, 100_000, 1e-10) {
                candidates.push(Poly::constant(c));
            }
        }
    }
    for x in [qr(1, 2), q(1), qr(1, 3), q(2)] {
        let b = vars.iter().map(|v| (*v, Poly::constant(x.clone()))).collect();
        let c = substitute(p, &b);
        if c.free_vars().is_empty() {
            candidates.push(c);
        }
    }
    for c in candidates {
        match is_zero(&p.sub(&c)) {
            Verdict::Zero => return Ok(Some(c)),
            Verdict::Unknown => {
                tr.numeric = true;
                tr.note(format!("{what}: constant value {c} confirmed numerically only"));
                return Ok(Some(c));
            }
            Verdict::NonZero(_) => {}
        }
    }
    Err(Error::Inconclusive(format!("{what} is constant but its value was not identified")))
}

/// A rational constant value, or an error naming the quantity.
pub fn rational_of(p: &Poly, what: &str) -> Result<crate::expr::Q> {
    p.as_constant()
        .ok_or_else(|| Error::Inconclusive(format!("{what} = {p} is not a rational constant")))
}

/// The sign of `p`, required to be the same at every sample point.
pub fn sign_of(p: &Poly, what: &str) -> Result<i64> {
    if let Some(c) = p.as_constant() {
        return Ok(if to_f64(&c) > 0.0 { 1 } else { -1 });
    }
    let vals = samples(p, 13);
    if vals.is_empty() {
        return Err(Error::Inconclusive(format!("{what}: no evaluable sample point")));
    }
    if vals.iter().all(|v| *v > 0.0) {
        Ok(1)
    } else if vals.iter().all(|v| *v < 0.0) {
        Ok(-1)
    } else {
        Err(Error::Inconclusive(format!("{what} changes sign")))
    }
}

/// `d/du` after the substitution `u~ = phi(u)`, given `scale = 1/phi'`.
pub fn d_new(p: &Poly, scale: &Poly) -> Poly {
    diff(p, Var::U).mul(scale)
}

pub fn ratio(num: &Poly, den: &Poly) -> Poly {
    num.mul(&den.powi(-1))
}
