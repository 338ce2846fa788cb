use eikonal_core::catalog::{case_f, case_operators, CaseParams};
use eikonal_core::equiv::{
    compose, discriminant, push_forward, reduction_catalog, transform_f, transform_quadratic, EquivTransform,
    QuadraticForm,
};
use eikonal_core::expr::eval::eval;
use eikonal_core::expr::rational::qr;
use eikonal_core::expr::zero::is_zero;
use eikonal_core::expr::{Env, OpaqueTable, Poly, Var};
use eikonal_core::jet::is_symmetry;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn t() -> Poly {
    Poly::var(Var::T)
}

fn u() -> Poly {
    Poly::var(Var::U)
}

fn konst(r: &mut impl Rng) -> Poly {
    let v = [qr(1, 2), qr(2, 1), qr(3, 2), qr(-1, 3), qr(-2, 1)];
    Poly::constant(v[r.gen_range(0..v.len())].clone())
}

/// A transform drawn from the named reductions plus a polynomial shear.
fn random_transform(r: &mut impl Rng) -> EquivTransform {
    let k = konst(r);
    let one = |s: &str| [(s.to_string(), k.clone())].into();
    match r.gen_range(0..9) {
        0 => reduction_catalog("t-scale", &one("k")).unwrap(),
        1 => reduction_catalog("u-scale", &one("k")).unwrap(),
        2 => reduction_catalog("t-translate", &one("k")).unwrap(),
        3 => reduction_catalog("u-translate", &one("k")).unwrap(),
        4 => reduction_catalog("x-scale", &one("delta")).unwrap(),
        5 => reduction_catalog("shear", &one("delta")).unwrap(),
        6 => reduction_catalog("sum-difference", &Default::default()).unwrap(),
        7 => reduction_catalog("swap", &Default::default()).unwrap(),
        _ => {
            let s = k.mul(&u().powi(2));
            EquivTransform::new(t().add(&s), u(), Poly::one(), t().sub(&s), u()).unwrap()
        }
    }
}

fn tu_poly(r: &mut impl Rng) -> Poly {
    let mut p = Poly::int(r.gen_range(-2..=2));
    for _ in 0..r.gen_range(1..3) {
        let m = Poly::int(r.gen_range(-2..=2))
            .mul(&t().powi(r.gen_range(0..2)))
            .mul(&u().powi(r.gen_range(0..3)));
        p = p.add(&m);
    }
    if r.gen_bool(0.3) {
        p = p.mul(&u().exp());
    }
    p
}

fn at(p: &Poly, tv: f64, uv: f64) -> f64 {
    eval(p, &Env::new().with(Var::T, tv).with(Var::U, uv), &OpaqueTable::new()).unwrap_or(f64::NAN)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn discriminant_scales_by_squared_jacobian(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let qf = QuadraticForm::new(tu_poly(&mut r), tu_poly(&mut r), tu_poly(&mut r));
        prop_assume!(qf.is_ok());
        let qf = qf.unwrap();
        let tr = random_transform(&mut r);
        let image = transform_quadratic(&qf, &tr).unwrap();
        let factor = tr.jacobian().powi(2).mul(&tr.delta.powi(-4));
        for _ in 0..10 {
            let (tv, uv) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let (nt, nu) = (at(&tr.zeta, tv, uv), at(&tr.phi, tv, uv));
            let lhs = at(&discriminant(&image), nt, nu);
            let rhs = at(&factor, tv, uv) * at(qf.discriminant(), tv, uv);
            prop_assert!(close(lhs, rhs), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn degenerate_forms_stay_degenerate(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (g, h, k) = (tu_poly(&mut r), tu_poly(&mut r), tu_poly(&mut r).add(&Poly::int(5)));
        let qf = QuadraticForm::new(g.powi(2).mul(&k), g.mul(&h).mul(&k).scale(&qr(2, 1)), h.powi(2).mul(&k));
        prop_assume!(qf.is_ok());
        let qf = qf.unwrap();
        prop_assert!(is_zero(qf.discriminant()).is_zero());
        let tr = random_transform(&mut r);
        let image = transform_quadratic(&qf, &tr).unwrap();
        prop_assert!(is_zero(image.discriminant()).is_zero(), "{}", image.discriminant());
    }

    #[test]
    fn composition_matches_sequential_maps(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (t1, t2) = (random_transform(&mut r), random_transform(&mut r));
        let c = compose(&t1, &t2);
        for _ in 0..10 {
            let (tv, uv) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let (at1, au1) = (at(&t1.zeta, tv, uv), at(&t1.phi, tv, uv));
            prop_assert!(close(at(&c.zeta, tv, uv), at(&t2.zeta, at1, au1)));
            prop_assert!(close(at(&c.phi, tv, uv), at(&t2.phi, at1, au1)));
            let (nt, nu) = (at(&c.zeta, tv, uv), at(&c.phi, tv, uv));
            prop_assert!(close(at(&c.zeta_inv, nt, nu), tv));
            prop_assert!(close(at(&c.phi_inv, nt, nu), uv));
        }
        let f = tu_poly(&mut r).mul(&Poly::var(Var::Ut).powi(2)).add(&tu_poly(&mut r));
        let once = transform_f(&f, &c).unwrap();
        let twice = transform_f(&transform_f(&f, &t1).unwrap(), &t2).unwrap();
        prop_assert!(is_zero(&once.sub(&twice)).is_zero());
    }
}

#[test]
fn symmetries_are_transported() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let p = CaseParams::default();
    let mut checked = 0;
    while checked < 10 {
        let id = r.gen_range(1..=12);
        let f = case_f(id, &p).unwrap();
        let tr = random_transform(&mut r);
        let g = transform_f(&f, &tr).unwrap();
        for q in case_operators(id, 3, &p).unwrap() {
            let image = push_forward(&q, &tr);
            assert!(is_symmetry(&image, &g, 3).unwrap().is_zero(), "row {id}: {q} -> {image} on {g}");
        }
        checked += 1;
    }
}
