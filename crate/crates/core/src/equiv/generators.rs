use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::eval::eval;
use crate::expr::rational::{q, to_f64};
use crate::expr::{diff, Env, OpaqueTable, Poly, Var};
use crate::jet::VectorField;

/// A point field on (t, x, u) together with its action `f_factor * F @F`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedField {
    pub label: String,
    pub field: VectorField,
    /// Coefficient of `F @F` divided by `F`; a function of (t, u, ut).
    pub f_factor: Poly,
}

/// Translations, rotations, the dilation of `x` and the functional
/// generator built from `xi_bar(t, u)`, `eta_bar(t, u)`.
pub fn equivalence_generators(n: usize, xi_bar: &Poly, eta_bar: &Poly) -> Vec<ExtendedField> {
    let mut out = Vec::new();
    for a in 1..=n {
        out.push(ExtendedField {
            label: format!("@x{a}"),
            field: VectorField::dx(n, a),
            f_factor: Poly::zero(),
        });
    }
    for a in 1..=n {
        for b in a + 1..=n {
            out.push(ExtendedField {
                label: format!("J{a}{b}"),
                field: VectorField::rotation(n, a, b),
                f_factor: Poly::zero(),
            });
        }
    }
    let mut dil = VectorField::zero(n);
    for a in 1..=n {
        dil.xi[a - 1] = Poly::var(Var::X(a as u8));
    }
    out.push(ExtendedField {
        label: "dilation".into(),
        field: dil,
        f_factor: Poly::int(-2),
    });
    let mut g = VectorField::zero(n);
    g.xi0 = xi_bar.clone();
    g.eta = eta_bar.clone();
    let ut = Poly::var(Var::Ut);
    let f_factor = diff(eta_bar, Var::U)
        .sub(&diff(xi_bar, Var::U).mul(&ut))
        .scale(&q(2));
    out.push(ExtendedField {
        label: "functional".into(),
        field: g,
        f_factor,
    });
    out
}

/// Uniform dilation rate when every `xi^a` equals `s x_a`.
fn dilation_rate(v: &VectorField) -> f64 {
    let mut rate = None;
    for (a, c) in v.xi.iter().enumerate() {
        let s = c.coefficients_in(Var::X(a as u8 + 1)).and_then(|cs| match cs.as_slice() {
            [z, s] if z.is_zero() => s.as_constant(),
            _ => None,
        });
        match (s, &rate) {
            (Some(s), None) => rate = Some(s),
            (Some(s), Some(r)) if &s == r => {}
            _ => return 0.0,
        }
    }
    rate.map(|r| to_f64(&r)).unwrap_or(0.0)
}

pub const GENERATOR_POINTS: usize = 10;
pub const GENERATOR_TOL: f64 = 1e-6;

/// Compares `f_factor` with the derivative at zero of the factor
/// `delta^-2 (phi_u - zeta_u w)^2` along the family `zeta = t + e xi0`,
/// `phi = u + e eta`, `delta = exp(e s)`.
pub fn check_generator(g: &ExtendedField) -> bool {
    let v = &g.field;
    let s = dilation_rate(v);
    let ops = OpaqueTable::new();
    let parts = [
        diff(&v.xi0, Var::T),
        diff(&v.xi0, Var::U),
        diff(&v.eta, Var::T),
        diff(&v.eta, Var::U),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e4);
    let mut ok = 0;
    for _ in 0..20 * GENERATOR_POINTS {
        let env = Env::new()
            .with(Var::T, rng.gen_range(-1.5..1.5))
            .with(Var::U, rng.gen_range(-1.5..1.5))
            .with(Var::Ut, rng.gen_range(-1.5..1.5));
        let vals: Option<Vec<f64>> = parts.iter().map(|p| eval(p, &env, &ops).ok()).collect();
        let (Some(vals), Ok(expected)) = (vals, eval(&g.f_factor, &env, &ops)) else {
            continue;
        };
        let ut = env.vars[&Var::Ut];
        let factor = |e: f64| {
            let (zt, zu, pt, pu) = (1.0 + e * vals[0], e * vals[1], e * vals[2], 1.0 + e * vals[3]);
            let w = (pt + pu * ut) / (zt + zu * ut);
            (-2.0 * e * s).exp() * (pu - zu * w).powi(2)
        };
        let h = 1e-4;
        let numeric = (factor(h) - factor(-h)) / (2.0 * h);
        if (numeric - expected).abs() > GENERATOR_TOL * expected.abs().max(1.0) {
            return false;
        }
        ok += 1;
        if ok == GENERATOR_POINTS {
            return true;
        }
    }
    false
}
