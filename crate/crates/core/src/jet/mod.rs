//! Vector fields on (t, x, u), first prolongation and the symmetry
//! criterion on the manifold `u_a u_a = F(t, u, u_t)`.

pub mod algebra;
mod field;

use std::collections::BTreeMap;

use rand::Rng;

pub use algebra::{structure_constants, StructureConstants};
pub use field::{lie_bracket, VectorField};

use crate::error::{Error, Result};
use crate::expr::eval::{eval, eval_scaled};
use crate::expr::zero::{probe_tables_all, symbolic_zero, Witness};
use crate::expr::{diff, Env, OpaqueTable, Poly, Var, Verdict};

/// Coefficients of the first prolongation.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation1 {
    pub eta_t: Poly,
    pub eta_x: Vec<Poly>,
}

/// Total derivative truncated to first order: `D_mu = d_mu + u_mu d_u`.
pub fn total_derivative(f: &Poly, mu: Var) -> Poly {
    let jet = match mu {
        Var::T => Var::Ut,
        Var::X(a) => Var::Ux(a),
        other => panic!("total derivative along {other:?}"),
    };
    diff(f, mu).add(&Poly::var(jet).mul(&diff(f, Var::U)))
}

/// `eta^mu = D_mu eta - u_t D_mu xi0 - u_b D_mu xi^b`. For the rotation
/// `x1 @x2 - x2 @x1` this gives `eta^1 = -u_2`, `eta^2 = u_1`.
pub fn prolong1(q: &VectorField) -> Prolongation1 {
    let n = q.n;
    let coeff = |mu: Var| {
        let mut out = total_derivative(&q.eta, mu)
            .sub(&Poly::var(Var::Ut).mul(&total_derivative(&q.xi0, mu)));
        for b in 0..n {
            if !q.xi[b].is_zero() {
                out = out.sub(&Poly::var(Var::Ux(b as u8 + 1)).mul(&total_derivative(&q.xi[b], mu)));
            }
        }
        out
    };
    Prolongation1 {
        eta_t: coeff(Var::T),
        eta_x: (1..=n).map(|a| coeff(Var::X(a as u8))).collect(),
    }
}

/// Errors unless `f` depends on t, u and u_t only.
pub fn check_rhs(f: &Poly) -> Result<()> {
    for v in f.free_vars() {
        if !matches!(v, Var::T | Var::U | Var::Ut) {
            return Err(Error::IllegalDependence(format!(
                "right-hand side depends on {}",
                v.name()
            )));
        }
    }
    Ok(())
}

/// The residual `2 u_a eta^a - (xi0 F_t + eta F_u + eta^t F_ut)` before
/// reduction onto the equation manifold.
pub fn raw_residual(q: &VectorField, f: &Poly) -> Result<Poly> {
    check_rhs(f)?;
    q.validate()?;
    let pr = prolong1(q);
    let mut lhs = Poly::zero();
    for (a, ea) in pr.eta_x.iter().enumerate() {
        lhs = lhs.add(&Poly::var(Var::Ux(a as u8 + 1)).mul(ea));
    }
    let lhs = lhs.scale(&crate::expr::rational::q(2));
    let rhs = q
        .xi0
        .mul(&diff(f, Var::T))
        .add(&q.eta.mul(&diff(f, Var::U)))
        .add(&pr.eta_t.mul(&diff(f, Var::Ut)));
    Ok(lhs.sub(&rhs))
}

/// Replaces `u_n^2` by `F - sum_{a<n} u_a^2` until the result has degree at
/// most one in `u_n`.
pub fn reduce_on_manifold(r: &Poly, f: &Poly, n: usize) -> Poly {
    let un = Var::Ux(n as u8);
    let Some(coeffs) = r.coefficients_in(un) else {
        return r.clone();
    };
    let mut s = f.clone();
    for a in 1..n {
        s = s.sub(&Poly::var(Var::Ux(a as u8)).powi(2));
    }
    let mut out = Poly::zero();
    let mut pow = Poly::one();
    for (k, c) in coeffs.iter().enumerate() {
        if k % 2 == 0 && k > 0 {
            pow = pow.mul(&s);
        }
        let term = if k % 2 == 0 {
            c.mul(&pow)
        } else {
            c.mul(&pow).mul(&Poly::var(un))
        };
        out = out.add(&term);
    }
    out
}

pub fn symmetry_residual(q: &VectorField, f: &Poly, n: usize) -> Result<Poly> {
    if q.n != n {
        return Err(Error::DimensionMismatch(q.n, n));
    }
    Ok(reduce_on_manifold(&raw_residual(q, f)?, f, n))
}

/// Numeric values of a point of the first jet space.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: f64,
    pub ut: f64,
    pub ux: Vec<f64>,
    pub params: BTreeMap<String, f64>,
    pub on_manifold: bool,
}

impl JetPoint {
    pub fn env(&self) -> Env {
        let mut e = Env::new().with(Var::T, self.t).with(Var::U, self.u).with(Var::Ut, self.ut);
        for (a, x) in self.x.iter().enumerate() {
            e.set(Var::X(a as u8 + 1), *x);
        }
        for (a, x) in self.ux.iter().enumerate() {
            e.set(Var::Ux(a as u8 + 1), *x);
        }
        e.params = self.params.clone();
        e
    }
}

#[derive(Clone, Debug)]
pub struct SamplingConfig {
    pub radius: f64,
    pub max_rejections: usize,
    /// Optional box for u; rows with poles in u restrict it.
    pub u_range: Option<(f64, f64)>,
    /// Values for parameters; missing ones are drawn from the box.
    pub params: BTreeMap<String, f64>,
    pub tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            radius: 2.0,
            max_rejections: 10_000,
            u_range: None,
            params: BTreeMap::new(),
            tol: 1e-9,
        }
    }
}

/// Draws a point on `u_a u_a = F`. The last spatial derivative is solved
/// for; if the other derivatives overshoot `F` they are redrawn a few times
/// and finally set to zero.
pub fn sample_jet_point(
    f: &Poly,
    n: usize,
    ops: &OpaqueTable,
    rng: &mut impl Rng,
    cfg: &SamplingConfig,
) -> Result<JetPoint> {
    let r = cfg.radius;
    let mut params = cfg.params.clone();
    for p in f.params() {
        if !params.contains_key(p.name.as_ref()) {
            let x = match p.sign {
                crate::expr::Sign::Positive => rng.gen_range(0.2..r),
                crate::expr::Sign::Negative => -rng.gen_range(0.2..r),
                crate::expr::Sign::Any => rng.gen_range(-r..r),
            };
            params.insert(p.name.to_string(), x);
        }
    }
    for _ in 0..cfg.max_rejections {
        let t = rng.gen_range(-r..r);
        let u = match cfg.u_range {
            Some((lo, hi)) => rng.gen_range(lo..hi),
            None => rng.gen_range(-r..r),
        };
        let ut = rng.gen_range(-r..r);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
        let mut env = Env::new().with(Var::T, t).with(Var::U, u).with(Var::Ut, ut);
        env.params = params.clone();
        let fv = match eval(f, &env, ops) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if fv <= 0.0 {
            continue;
        }
        let mut ux = vec![0.0; n];
        for _ in 0..8 {
            let draw: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-r..r)).collect();
            let s: f64 = draw.iter().map(|v| v * v).sum();
            if fv - s > 0.0 {
                ux[..n - 1].copy_from_slice(&draw);
                break;
            }
        }
        let rest: f64 = ux[..n - 1].iter().map(|v| v * v).sum();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        ux[n - 1] = sign * (fv - rest).sqrt();
        let total: f64 = ux.iter().map(|v| v * v).sum();
        return Ok(JetPoint {
            t,
            x,
            u,
            ut,
            ux,
            params,
            on_manifold: (total - fv).abs() < cfg.tol.max(1e-12) * fv.max(1.0),
        });
    }
    Err(Error::SamplingExhausted(cfg.max_rejections))
}

/// Largest relative value of `r` over `samples` jet points of `f`; NaN
/// when no point could be evaluated.
pub fn max_sampled_residual(r: &Poly, f: &Poly, n: usize, cfg: &SamplingConfig, samples: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ops = &probe_tables_all(&[r, f])[0];
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    for _ in 0..samples * 4 {
        let Ok(p) = sample_jet_point(f, n, ops, &mut rng, cfg) else {
            break;
        };
        if let Ok((v, scale)) = eval_scaled(r, &p.env(), ops) {
            worst = worst.max(v.abs() / scale.max(1.0));
            taken += 1;
            if taken == samples {
                break;
            }
        }
    }
    if taken == 0 {
        f64::NAN
    } else {
        worst
    }
}

/// The unreduced residual evaluated at a jet point.
pub fn numeric_residual(q: &VectorField, f: &Poly, p: &JetPoint, ops: &OpaqueTable) -> Result<f64> {
    let r = raw_residual(q, f)?;
    eval(&r, &p.env(), ops)
}

#[derive(Clone, Debug)]
pub struct SymmetryConfig {
    pub sampling: SamplingConfig,
    pub points: usize,
    pub seed: u64,
    /// Relative tolerance for declaring a sampled residual nonzero.
    pub tol: f64,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        SymmetryConfig {
            sampling: SamplingConfig::default(),
            points: 24,
            seed: 7,
            tol: 1e-9,
        }
    }
}

pub fn is_symmetry(q: &VectorField, f: &Poly, n: usize) -> Result<Verdict> {
    is_symmetry_with(q, f, n, &SymmetryConfig::default())
}

/// Zero when the reduced residual vanishes identically; NonZero carries an
/// on-manifold witness.
pub fn is_symmetry_with(q: &VectorField, f: &Poly, n: usize, cfg: &SymmetryConfig) -> Result<Verdict> {
    let r = symmetry_residual(q, f, n)?;
    if symbolic_zero(&r) {
        return Ok(Verdict::Zero);
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let tables = probe_tables_all(&[&r, f]);
    for (ti, ops) in tables.iter().enumerate() {
        for _ in 0..cfg.points {
            let Ok(p) = sample_jet_point(f, n, ops, &mut rng, &cfg.sampling) else {
                break;
            };
            if let Ok((v, scale)) = eval_scaled(&r, &p.env(), ops) {
                if v.abs() > cfg.tol * scale.max(1.0) {
                    return Ok(Verdict::NonZero(Witness {
                        env: p.env(),
                        probe: ti,
                        value: v,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::opaque_app;
    use crate::expr::zero::probe_tables;

    #[test]
    fn rotation_prolongation_sign() {
        let j = VectorField::rotation(2, 1, 2);
        let pr = prolong1(&j);
        assert_eq!(pr.eta_t, Poly::zero());
        assert_eq!(pr.eta_x[0], Poly::var(Var::Ux(2)).neg());
        assert_eq!(pr.eta_x[1], Poly::var(Var::Ux(1)));
    }

    #[test]
    fn t_scaling() {
        let mut q = VectorField::zero(2);
        q.xi0 = Poly::var(Var::T);
        let pr = prolong1(&q);
        assert_eq!(pr.eta_t, Poly::var(Var::Ut).neg());
        let ut = Poly::var(Var::Ut);
        let r = symmetry_residual(&q, &ut.powi(2), 2).unwrap();
        assert_eq!(r, ut.powi(2).scale(&crate::expr::rational::q(2)));
    }

    #[test]
    fn kernel_zero() {
        let f = opaque_app("F", vec![Poly::var(Var::T), Poly::var(Var::U), Poly::var(Var::Ut)]);
        for q in [VectorField::dx(3, 1), VectorField::rotation(3, 1, 3)] {
            assert_eq!(is_symmetry(&q, &f, 3).unwrap(), Verdict::Zero);
        }
    }

    #[test]
    fn nonzero_has_on_manifold_witness() {
        let f = Poly::var(Var::U).exp().mul(&opaque_app("h", vec![Poly::var(Var::Ut)]));
        match is_symmetry(&VectorField::du(2), &f, 2).unwrap() {
            Verdict::NonZero(w) => {
                let ops = &probe_tables(&f)[w.probe];
                let fv = eval(&f, &w.env, ops).unwrap();
                let s = w.env.vars[&Var::Ux(1)].powi(2) + w.env.vars[&Var::Ux(2)].powi(2);
                assert!((fv - s).abs() < 1e-9 * fv.max(1.0));
            }
            v => panic!("{v:?}"),
        }
    }
}
