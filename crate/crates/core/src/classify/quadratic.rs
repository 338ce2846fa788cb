use super::chain::{self, ChainStep};
use super::probe::{constant_of, d_new, ratio, sign_of, vanishes, Tracker};
use super::{finalize, Classification};
use crate::equiv::{antiderivative, EquivTransform, QuadraticForm};
use crate::error::{Error, Result};
use crate::expr::rational::{q, qr};
use crate::expr::{Poly, Var};

fn u() -> Poly {
    Poly::var(Var::U)
}

fn t() -> Poly {
    Poly::var(Var::T)
}

fn is_const(p: &Poly) -> bool {
    p.free_vars().is_empty()
}

fn no_real_solutions(e1: i64, e2: i64) -> Result<()> {
    if e1 == -1 && e2 == -1 {
        return Err(Error::ConstraintViolation(
            "the normalized right-hand side is negative: no real solutions".into(),
        ));
    }
    Ok(())
}

/// `|k|^(-1/2)` as a `t`-scale step, skipped when it is one.
fn t_scale_to_unit(k: &Poly, sign: i64) -> Result<Option<ChainStep>> {
    let mag = k.scale(&q(sign));
    if mag.as_constant() == Some(q(1)) {
        return Ok(None);
    }
    Ok(Some(ChainStep::catalog("t-scale", &[("k", mag.pow_q(&qr(-1, 2)))])?))
}

/// Classifies a quadratic right-hand side with `t`-free coefficients.
pub fn classify_quadratic(qf: &QuadraticForm) -> Result<Classification> {
    let mut tr = Tracker::default();
    let mut c = if vanishes(qf.discriminant(), "B^2 - 4AC", &mut tr)? {
        degenerate(qf, &mut tr)?
    } else {
        classify_in(qf, &mut tr)?
    };
    chain::finish(&qf.rhs(), &mut c, &mut tr)?;
    Ok(finalize(c, tr))
}

/// Zero discriminant: the eikonal row.
pub(super) fn degenerate(qf: &QuadraticForm, tr: &mut Tracker) -> Result<Classification> {
    let mut c = Classification::new(7, "ut^2");
    let (a, b) = (&qf.a, &qf.b);
    if is_const(a) && is_const(b) && !vanishes(a, "A", tr)? && sign_of(a, "A").ok() == Some(1) {
        let k = ratio(b, a).scale(&qr(1, 2));
        let mut steps = Vec::new();
        if !k.is_zero() {
            steps.push(ChainStep::catalog("shear", &[("delta", k)])?);
        }
        if a.as_constant() != Some(q(1)) {
            steps.push(ChainStep::catalog("x-scale", &[("delta", a.pow_q(&qr(1, 2)))])?);
        }
        c.chain = steps;
    }
    Ok(c)
}

/// The normalizing step `zeta = t + z u`, `phi = kappa u / s`, `delta =
/// |kappa|` for constant `z` and `s`.
fn normalize_step(z: &Poly, s: &Poly, kappa: &Poly, kappa_sign: i64) -> Result<Option<ChainStep>> {
    if z.is_zero() && s.as_constant() == Some(q(1)) && kappa.as_constant() == Some(q(1)) {
        return Ok(None);
    }
    let phi = kappa.mul(&u()).mul(&s.powi(-1));
    let back_u = s.mul(&u()).mul(&kappa.powi(-1));
    let tr = EquivTransform::restricted(
        Poly::one(),
        z.mul(&u()),
        phi,
        kappa.scale(&q(kappa_sign)),
        t().sub(&z.mul(&back_u)),
        back_u,
    )?;
    Ok(Some(ChainStep::custom(
        "normalize",
        &[("z", z.clone()), ("s", s.clone()), ("kappa", kappa.clone())],
        tr,
    )))
}

/// Data of the `B = 0`, `C = eps1` normal form, expressed in the old `u`.
struct Normal {
    eps1: i64,
    /// `A~` as a function of the old `u`.
    a: Poly,
    /// `1 / phi'`, turning `d/du` into `d/du~`.
    scale: Poly,
    /// `u~` in terms of the old `u`, when integrable.
    phi: Option<Poly>,
    /// Constant `z` and `s` when the step can be built.
    consts: Option<(Poly, Poly)>,
}

fn normal_form(qf: &QuadraticForm, tr: &mut Tracker) -> Result<Normal> {
    let (b, c) = (&qf.b, &qf.c);
    let eps1 = sign_of(c, "C")?;
    let abs_c = c.scale(&q(eps1));
    let a = qf.discriminant().mul(&c.powi(-1)).scale(&qr(-1, 4));
    let scale = abs_c.pow_q(&qr(1, 2));
    if is_const(b) && is_const(c) {
        let z = ratio(b, c).scale(&qr(1, 2));
        return Ok(Normal {
            eps1,
            a,
            phi: Some(u().mul(&scale.powi(-1))),
            scale: scale.clone(),
            consts: Some((z, scale)),
        });
    }
    let z = antiderivative(&ratio(b, c).scale(&qr(1, 2)), Var::U);
    let phi = antiderivative(&abs_c.pow_q(&qr(-1, 2)), Var::U);
    if z.is_none() || phi.is_none() {
        tr.numeric = true;
        tr.note("normalization unavailable: antiderivative outside the table");
    } else {
        tr.note("normalizing map integrable but its inverse was not constructed");
    }
    Ok(Normal {
        eps1,
        a,
        scale,
        phi,
        consts: None,
    })
}

fn sign_class_row(eps0: i64, eps1: i64, eps2: i64) -> (usize, i64) {
    match (eps0 * eps1, eps0 * eps2) {
        (1, 1) => (12, 1),
        (-1, -1) => (10, 1),
        (1, -1) => (11, 1),
        _ => (11, -1),
    }
}

pub(super) fn classify_in(qf: &QuadraticForm, tr: &mut Tracker) -> Result<Classification> {
    for p in [&qf.a, &qf.b, &qf.c] {
        if p.depends_on(Var::T) {
            return Err(Error::IllegalDependence("coefficients must not depend on t".into()));
        }
    }
    if vanishes(&qf.c, "C", tr)? {
        return zero_c(qf, tr);
    }
    let nf = normal_form(qf, tr)?;
    let e1 = nf.eps1;
    let norm = |kappa: &Poly, sign: i64| -> Result<Option<ChainStep>> {
        match &nf.consts {
            Some((z, s)) => normalize_step(z, s, kappa, sign),
            None => Ok(None),
        }
    };
    let chainable = nf.consts.is_some();
    let d = |p: &Poly| d_new(p, &nf.scale);
    let da = d(&nf.a);
    if vanishes(&da, "A~_u", tr)? {
        let e2 = sign_of(&nf.a, "A~")?;
        no_real_solutions(e1, e2)?;
        let mut c = Classification::new(8, "eps2*ut^2 + eps1").with_int("eps1", e1).with_int("eps2", e2);
        if chainable {
            c.chain = [norm(&Poly::one(), 1)?, t_scale_to_unit(&nf.a, e2)?].into_iter().flatten().collect();
        }
        return Ok(c);
    }
    let r = ratio(&nf.a, &da);
    if let Some(cst) = constant_of(&d(&r), "(A/A_u)_u", tr)? {
        if !vanishes(&cst, "(A/A_u)_u", tr)? {
            let nu = cst.powi(-1).neg();
            let mu = match &nf.phi {
                Some(phi) => constant_of(&ratio(&r, &cst).sub(phi), "power-law shift", tr)?,
                None => None,
            };
            return power_law(&nf, nu, mu, chainable.then_some(norm(&Poly::one(), 1)?).flatten(), tr);
        }
    }
    let lg = ratio(&da, &nf.a);
    let e2 = sign_of(&nf.a, "A~")?;
    if vanishes(&d(&lg), "(A_u/A)_u", tr)? {
        no_real_solutions(e1, e2)?;
        let mut c = Classification::new(9, "eps2*exp(u)*ut^2 + eps1").with_int("eps1", e1).with_int("eps2", e2);
        let lam = constant_of(&lg, "A_u/A", tr)?;
        if let (true, Some(lam), Some(phi)) = (chainable, lam.clone(), &nf.phi) {
            let k = constant_of(&nf.a.mul(&lam.mul(phi).neg().exp()), "exponential amplitude", tr)?;
            let lam_sign = sign_of(&lam, "rate")?;
            if let Some(k) = k {
                let kk = k.scale(&q(e2)).pow_q(&qr(-1, 2)).mul(&lam.scale(&q(lam_sign)));
                let mut steps: Vec<ChainStep> = norm(&lam, lam_sign)?.into_iter().collect();
                if kk.as_constant() != Some(q(1)) {
                    steps.push(ChainStep::catalog("t-scale", &[("k", kk)])?);
                }
                c.chain = steps;
            }
        }
        if let Some(lam) = lam {
            c = c.with("mu", lam);
        }
        return Ok(c);
    }
    let sq = lg.powi(2);
    let c1 = constant_of(&ratio(&d(&sq), &da), "((A_u/A)^2)_u / A_u", tr)?;
    if let Some(c1) = c1 {
        let c0 = constant_of(&sq.sub(&c1.mul(&nf.a)), "(A_u/A)^2 - c1 A", tr)?;
        if let Some(c0) = c0 {
            if !vanishes(&c1, "c1", tr)? && !vanishes(&c0, "c0", tr)? {
                no_real_solutions(e1, e2)?;
                let eps0 = sign_of(&c0, "c0")?;
                let (id, pm) = sign_class_row(eps0, e1, e2);
                tr.note(
                    "rows 10-12 detected by (A_u/A)^2 = c0 + c1 A; A_u/A = nu A + mu fails for the listed functions",
                );
                tr.note(
                    "sign classes: equations are equivalent iff eps0 eps0~ = eps1 eps1~ = eps2 eps2~",
                );
                let name = crate::catalog::row(id)?.template.clone();
                let mut c = Classification::new(id, &name)
                    .with_int("eps0", eps0)
                    .with_int("eps1", e1)
                    .with_int("eps2", e2)
                    .with("c0", c0)
                    .with("c1", c1);
                if id == 11 {
                    c = c.with_int("pm", pm);
                }
                return Ok(c);
            }
        }
    }
    tr.note("no condition on A~ holds: only the t-translation extends the kernel");
    Ok(Classification::new(1, "exp(delta*t)*f(u, ut)").with_int("delta", 0))
}

/// `A~ = K |u~ + mu|^(-nu)`.
fn power_law(
    nf: &Normal,
    nu: Poly,
    mu: Option<Poly>,
    first: Option<ChainStep>,
    tr: &mut Tracker,
) -> Result<Classification> {
    let e1 = nf.eps1;
    let prefix: Vec<ChainStep> = first.into_iter().collect();
    let chainable = nf.consts.is_some() && mu.is_some();
    if nu.as_constant() == Some(q(2)) {
        let e_a = sign_of(&nf.a, "A~")?;
        let (map, e2) = if e1 * e_a < 0 { ("sinh-cosh", -e1) } else { ("sin-cos", e1) };
        no_real_solutions(e1, e2)?;
        tr.note(format!("(u + mu) A_u + 2A = 0: reduced to A_u = 0 by the {map} map"));
        let mut c = Classification::new(8, "eps2*ut^2 + eps1").with_int("eps1", e1).with_int("eps2", e2);
        if let (true, Some(mu), Some(phi)) = (chainable, &mu, &nf.phi) {
            let k = constant_of(&nf.a.mul(&phi.add(mu).powi(2)), "power-law amplitude", tr)?;
            if let Some(k) = k {
                let mut steps = prefix;
                steps.extend(t_scale_to_unit(&k, e_a)?);
                steps.push(ChainStep::catalog(map, &[("mu", mu.clone())])?);
                c.chain = steps;
            }
        }
        return Ok(c.with("nu", nu));
    }
    let delta = Poly::int(4).mul(&Poly::int(2).sub(&nu).powi(-1));
    let mut c = Classification::new(3, "abs(u)^(2 - delta)*h(ut)")
        .with("delta", delta)
        .with("nu", nu.clone());
    if let (true, Some(mu)) = (chainable, &mu) {
        let mut steps = prefix;
        steps.push(ChainStep::catalog("power-u", &[("mu", mu.clone()), ("nu", nu)])?);
        c.chain = steps;
    }
    if let Some(mu) = mu {
        c = c.with("mu", mu);
    }
    Ok(c)
}

/// `C = 0`: `B ut` alone goes through the sum-difference map; constant
/// `A`, `B` are first sheared to `C != 0`.
fn zero_c(qf: &QuadraticForm, tr: &mut Tracker) -> Result<Classification> {
    let (a, b) = (&qf.a, &qf.b);
    if vanishes(a, "A", tr)? {
        let mut c = Classification::new(8, "eps2*ut^2 + eps1").with_int("eps1", 1).with_int("eps2", -1);
        if is_const(b) {
            let mut steps = Vec::new();
            if b.as_constant() != Some(q(1)) {
                steps.push(ChainStep::catalog("u-scale", &[("k", b.powi(-1))])?);
            }
            steps.push(ChainStep::catalog("sum-difference", &[])?);
            c.chain = steps;
        } else {
            tr.note("B(u) ut: the map u~ = int du / B precedes the sum-difference map; not constructed");
        }
        return Ok(c);
    }
    if is_const(a) && is_const(b) {
        let k = ratio(b, a).scale(&qr(1, 2));
        let shear = ChainStep::catalog("shear", &[("delta", k.clone())])?;
        let c_new = b.mul(&k).scale(&qr(-1, 2));
        let moved = QuadraticForm::new(a.clone(), Poly::zero(), c_new)?;
        let mut c = classify_in(&moved, tr)?;
        c.chain.insert(0, shear);
        return Ok(c);
    }
    Err(Error::Inconclusive(
        "C = 0 with non-constant A, B: the normalization is not automated".into(),
    ))
}
