use super::chain::ChainStep;
use super::probe::{constant_of, rational_of, ratio, vanishes, Tracker};
use super::Classification;
use crate::error::{Error, Result};
use crate::expr::rational::{q, qr};
use crate::expr::calculus::substitute_var;
use crate::expr::{diff, Func, Poly, Var};

fn u() -> Poly {
    Poly::var(Var::U)
}

fn ut() -> Poly {
    Poly::var(Var::Ut)
}

/// `L = nu / (u + m) + mu` with constants `nu`, `m`, `mu`; `nu = 0` when
/// `L` is constant.
pub(super) struct LogForm {
    pub nu: Poly,
    pub m: Poly,
    pub mu: Poly,
}

pub(super) fn log_form(l: &Poly, what: &str, tr: &mut Tracker) -> Result<Option<LogForm>> {
    let l1 = diff(l, Var::U);
    if vanishes(&l1, &format!("{what}_u"), tr)? {
        let Some(mu) = constant_of(l, what, tr)? else {
            return Ok(None);
        };
        return Ok(Some(LogForm {
            nu: Poly::zero(),
            m: Poly::zero(),
            mu,
        }));
    }
    let l2 = diff(&l1, Var::U);
    if vanishes(&l2, &format!("{what}_uu"), tr)? {
        return Ok(None);
    }
    let nu_expr = l1.powi(3).mul(&l2.powi(-2)).scale(&q(-4));
    let Some(nu) = constant_of(&nu_expr, &format!("power in {what}"), tr)? else {
        return Ok(None);
    };
    let shift = ratio(&l1, &l2).scale(&q(-2)).sub(&u());
    let Some(m) = constant_of(&shift, &format!("shift in {what}"), tr)? else {
        return Ok(None);
    };
    let rest = l.sub(&nu.mul(&u().add(&m).powi(-1)));
    let Some(mu) = constant_of(&rest, &format!("rate in {what}"), tr)? else {
        return Ok(None);
    };
    Ok(Some(LogForm { nu, m, mu }))
}

fn is_const_zero(p: &Poly, what: &str, tr: &mut Tracker) -> Result<bool> {
    vanishes(p, what, tr)
}

fn x_scale_for(alpha: &Poly) -> Result<Option<ChainStep>> {
    let Some(a) = alpha.as_constant() else {
        return Ok(None);
    };
    if a <= q(0) {
        return Ok(None);
    }
    if a == q(1) {
        return Ok(None);
    }
    Ok(Some(ChainStep::catalog("x-scale", &[("delta", Poly::constant(a).pow_q(&qr(1, 2)))])?))
}

fn generic_row(id: usize) -> Classification {
    let name = match id {
        1 => "exp(delta*t)*f(u, ut)",
        2 => "exp(u)*h(ut)",
        3 => "abs(u)^(2 - delta)*h(ut)",
        _ => "h(ut)",
    };
    Classification::new(id, name)
}

/// The `t`-free, non-quadratic path: the integrable forms first, then the
/// generic rows 2 to 4, then row 1 with `delta = 0`.
pub(super) fn classify_template(f: &Poly, tr: &mut Tracker) -> Result<Classification> {
    let l = ratio(&diff(f, Var::U), f);
    let r = ratio(&diff(f, Var::Ut), f);
    let lambda4 = ut().scale(&q(2)).sub(&ut().powi(2).mul(&r));
    if let Some(lam) = constant_of(&lambda4, "ut^2 (2/ut - F_ut/F)", tr)? {
        if !is_const_zero(&lam, "exp-ut exponent", tr)? {
            return exp_inv(f, &lam, tr);
        }
    }
    if let Some(lam) = constant_of(&r, "F_ut / F", tr)? {
        if !is_const_zero(&lam, "F_ut / F", tr)? {
            if let Some(c) = item1(f, &l, &lam, tr)? {
                return Ok(c);
            }
        }
    }
    let separable = vanishes(&diff(&l, Var::Ut), "(F_u / F)_ut", tr)?;
    if separable {
        if let Some(c) = item2(f, &l, &r, tr)? {
            return Ok(c);
        }
    }
    let arctan = arctan_form(&r, tr)?;
    let mut c = generic(&l, separable, tr)?;
    if arctan {
        c.template = format!("{} (via alpha(u)*exp(beta*atan(ut)))", c.template);
        tr.note("arctan form recognized; it reduces to the generic rows");
    }
    Ok(c)
}

fn generic(l: &Poly, separable: bool, tr: &mut Tracker) -> Result<Classification> {
    if !separable {
        return Ok(generic_row(1).with_int("delta", 0));
    }
    if vanishes(l, "F_u / F", tr)? {
        return Ok(generic_row(4));
    }
    if let Some(lf) = log_form(l, "F_u / F", tr)? {
        let nu0 = is_const_zero(&lf.nu, "power", tr)?;
        let mu0 = is_const_zero(&lf.mu, "rate", tr)?;
        if nu0 && !mu0 {
            let mut c = generic_row(2);
            c.chain = vec![ChainStep::catalog("u-scale", &[("k", lf.mu.clone())])?];
            return Ok(c.with("mu", lf.mu));
        }
        if !nu0 && mu0 {
            let delta = Poly::int(2).sub(&lf.nu);
            let mut c = generic_row(3).with("delta", delta);
            c.chain = vec![ChainStep::catalog("u-translate", &[("k", lf.m.clone())])?];
            return Ok(c.with("nu", lf.nu));
        }
    }
    Ok(generic_row(1).with_int("delta", 0))
}

/// `alpha(u) ut^2 exp(lambda / ut)`, equivalent to `exp(ut)`.
fn exp_inv(f: &Poly, lam: &Poly, tr: &mut Tracker) -> Result<Classification> {
    let mut c = Classification::new(5, "alpha(u)*ut^2*exp(1/ut)");
    tr.note("exp-ut form: equivalent to exp(ut) by t~ = u, u~ = t + int ln(alpha)");
    let alpha = f.mul(&ut().powi(-2)).mul(&lam.mul(&ut().powi(-1)).neg().exp());
    let mut chain = Vec::new();
    if lam.as_constant() != Some(q(1)) {
        chain.push(ChainStep::catalog("t-scale", &[("k", lam.clone())])?);
    }
    let alpha = alpha.mul(&lam.powi(2));
    if let Ok(s) = ChainStep::catalog("exp-ut", &[("alpha", alpha)]) {
        chain.push(s);
        c.chain = chain;
    }
    Ok(c)
}

/// `alpha(u) exp(lambda ut)`.
fn item1(f: &Poly, l: &Poly, lam: &Poly, tr: &mut Tracker) -> Result<Option<Classification>> {
    let Some(lf) = log_form(l, "alpha'/alpha", tr)? else {
        return Ok(None);
    };
    let mut chain = Vec::new();
    if lam.as_constant() != Some(q(1)) {
        chain.push(ChainStep::catalog("t-scale", &[("k", lam.powi(-1))])?);
    }
    let nu0 = is_const_zero(&lf.nu, "power of alpha", tr)?;
    let mu0 = is_const_zero(&lf.mu, "rate of alpha", tr)?;
    let alpha = f.mul(&lam.mul(&ut()).neg().exp());
    let name = "alpha(u)*exp(ut)";
    if nu0 {
        let mut c = Classification::new(5, name).with("mu", lf.mu.clone());
        if mu0 {
            let a = constant_of(&alpha, "alpha", tr)?;
            if let Some(s) = a.as_ref().map(x_scale_for).transpose()?.flatten() {
                chain.push(s);
            }
        } else {
            chain.push(ChainStep::catalog("exp-scale-shift", &[("mu", lf.mu.clone())])?);
            tr.note("alpha = A exp(mu u): A is not removed by the constructed chain");
        }
        c.chain = chain;
        return Ok(Some(c));
    }
    let nu_is_2 = lf.nu.as_constant() == Some(q(2));
    if mu0 || nu_is_2 {
        let delta = if mu0 { Poly::int(2).sub(&lf.nu) } else { Poly::zero() };
        let mut c = Classification::new(3, name).with("delta", delta).with("nu", lf.nu.clone());
        if !(lf.m.is_zero()) {
            chain.push(ChainStep::catalog("u-translate", &[("k", lf.m.clone())])?);
        }
        if !mu0 {
            chain.push(ChainStep::catalog("exp-scale", &[("mu", lf.mu.clone())])?);
        }
        c.chain = chain;
        return Ok(Some(c));
    }
    tr.note("alpha = |u + m|^nu exp(mu u) with nu not in {0, 2}: no extension beyond the generic rows");
    Ok(None)
}

/// `alpha(u) |ut + delta|^beta` with constant `beta`.
fn item2(f: &Poly, l: &Poly, r: &Poly, tr: &mut Tracker) -> Result<Option<Classification>> {
    let s = r.powi(-1);
    let Some(slope) = constant_of(&diff(&s, Var::Ut), "(F / F_ut)_ut", tr)? else {
        return Ok(None);
    };
    if is_const_zero(&slope, "(F / F_ut)_ut", tr)? {
        return Ok(None);
    }
    let beta = slope.powi(-1);
    let Some(shift) = constant_of(&beta.mul(&s).sub(&ut()), "shift in ut", tr)? else {
        return Ok(None);
    };
    let bq = rational_of(&beta, "beta")?;
    if [q(0), q(1), q(2)].contains(&bq) {
        return Ok(None);
    }
    let base = ut().add(&shift);
    let at_one = |p: &Poly| substitute_var(p, Var::Ut, &Poly::one().sub(&shift));
    let absed = base.apply(Func::Abs).pow_q(&bq);
    let plain = base.pow_q(&bq);
    let mut alpha = None;
    for (power, branchwise) in [(absed, false), (plain, true)] {
        let a = at_one(&f.mul(&power.powi(-1)));
        if vanishes(&f.sub(&a.mul(&power)), "F - alpha |ut + delta|^beta", tr)? {
            if branchwise {
                tr.note("matched |ut + delta|^beta on the branch ut + delta > 0");
            }
            alpha = Some(a);
            break;
        }
    }
    let Some(alpha) = alpha else {
        return Ok(None);
    };
    let name = "alpha(u)*abs(ut + delta)^beta";
    let shift0 = is_const_zero(&shift, "delta", tr)?;
    let mut chain = Vec::new();
    if shift0 {
        if let Some(a) = constant_of(&alpha, "alpha", tr)? {
            if let Some(s) = x_scale_for(&a)? {
                chain.push(s);
            }
        } else {
            tr.note("alpha(u) is removed by u~ = int alpha^(1/(beta - 2)) du; not constructed");
        }
        let mut c = Classification::new(6, name).with("beta", beta);
        c.chain = chain;
        return Ok(Some(c));
    }
    let Some(mu) = constant_of(l, "alpha'/alpha", tr)? else {
        tr.note("delta != 0 and (alpha'/alpha)' != 0: no new extension");
        return Ok(None);
    };
    if is_const_zero(&mu, "mu", tr)? {
        chain.push(ChainStep::catalog("shear", &[("delta", shift.clone())])?);
        if let Some(a) = constant_of(&alpha, "alpha", tr)? {
            if let Some(s) = x_scale_for(&a)? {
                chain.push(s);
            }
        }
    } else {
        chain.push(ChainStep::catalog(
            "shear-exp",
            &[("mu", mu.clone()), ("delta", shift.clone()), ("beta", beta.clone())],
        )?);
    }
    let mut c = Classification::new(6, name).with("beta", beta).with("mu", mu);
    c.chain = chain;
    Ok(Some(c))
}

/// `F_ut / F = (k ut + beta) / (1 + ut^2)` with `k` in {0, 2}.
fn arctan_form(r: &Poly, tr: &mut Tracker) -> Result<bool> {
    let scaled = r.mul(&Poly::one().add(&ut().powi(2)));
    for k in [0, 2] {
        let b = scaled.sub(&ut().scale(&q(k)));
        let mut probe = Tracker::default();
        if let Ok(Some(v)) = constant_of(&b, "arctan exponent", &mut probe) {
            if !vanishes(&v, "beta", &mut probe)? {
                tr.numeric |= probe.numeric;
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Confirms that `g` has the shape of rows 0 to 4 with the classification's
/// parameters.
pub(super) fn recheck(g: &Poly, c: &Classification, tr: &mut Tracker) -> Result<bool> {
    let gt = diff(g, Var::T);
    let delta = c.param("delta").cloned().unwrap_or_else(Poly::zero);
    match c.case_id {
        0 => Ok(true),
        1 => {
            if delta.is_zero() {
                vanishes(&gt, "F_t", tr)
            } else {
                vanishes(&ratio(&gt, g).sub(&delta), "F_t / F - delta", tr)
            }
        }
        id => {
            if !vanishes(&gt, "F_t", tr)? {
                return Ok(false);
            }
            let gu = diff(g, Var::U);
            match id {
                2 => vanishes(&ratio(&gu, g).sub(&Poly::one()), "F_u / F - 1", tr),
                3 => {
                    let e = u().mul(&ratio(&gu, g)).sub(&Poly::int(2).sub(&delta));
                    vanishes(&e, "u F_u / F - (2 - delta)", tr)
                }
                _ => vanishes(&gu, "F_u", tr),
            }
        }
    }
}

/// The table row whose template `f` matches.
pub fn match_template(f: &Poly) -> Result<(usize, String)> {
    let mut tr = Tracker::default();
    if !vanishes(&diff(f, Var::T), "F_t", &mut tr)? {
        let r = ratio(&diff(f, Var::T), f);
        return match constant_of(&r, "F_t / F", &mut tr)? {
            Some(_) => Ok((1, "exp(delta*t)*f(u, ut)".into())),
            None => Err(Error::NoTemplate),
        };
    }
    let c = classify_template(f, &mut tr)?;
    Ok((c.case_id, c.template))
}
