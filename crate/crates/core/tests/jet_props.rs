mod common;

use eikonal_core::catalog::{case_f, case_operators, kernel, sampling_for, CaseParams, CASE_COUNT};
use eikonal_core::expr::eval::eval;
use eikonal_core::expr::rational::qr;
use eikonal_core::expr::zero::probe_tables;
use eikonal_core::expr::{symbolic_zero, Poly, Session, Var};
use eikonal_core::jet::{
    is_symmetry, lie_bracket, max_sampled_residual, reduce_on_manifold, sample_jet_point, symmetry_residual,
    SamplingConfig, VectorField,
};
use eikonal_core::syntax::{parse_declarations, parse_poly, parse_vector_field};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn br(a: &VectorField, b: &VectorField) -> VectorField {
    lie_bracket(a, b).unwrap()
}

fn vanishes(v: &VectorField) -> bool {
    v.components().into_iter().all(|c| c.is_zero() || symbolic_zero(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(seed in any::<u64>(), a in -3i64..3, b in 1i64..4) {
        let mut r = rng(seed);
        let (x, y, z) = (common::random_field(&mut r, 2), common::random_field(&mut r, 2), common::random_field(&mut r, 2));
        prop_assert!(vanishes(&br(&x, &y).add(&br(&y, &x))));
        let (ka, kb) = (Poly::constant(qr(a, b)), Poly::constant(qr(b, 3)));
        let lhs = br(&x, &y.scale(&ka).add(&z.scale(&kb)));
        let rhs = br(&x, &y).scale(&ka).add(&br(&x, &z).scale(&kb));
        prop_assert!(vanishes(&lhs.sub(&rhs)));
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y, z) = (common::random_field(&mut r, 2), common::random_field(&mut r, 2), common::random_field(&mut r, 2));
        let sum = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
        prop_assert!(vanishes(&sum));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn manifold_reduction_preserves_values(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 3;
        let f = common::random_expr(&mut r, 2).powi(2).add(&Poly::one());
        let mut res = common::random_expr(&mut r, 2);
        for _ in 0..3 {
            let a = r.gen_range(1..=n) as u8;
            let k = r.gen_range(1..4);
            res = res.add(&Poly::var(Var::Ux(a)).powi(k).mul(&common::random_expr(&mut r, 1)));
        }
        let reduced = reduce_on_manifold(&res, &f, n);
        let ops = &probe_tables(&f)[0];
        for _ in 0..10 {
            let p = sample_jet_point(&f, n, ops, &mut r, &SamplingConfig::default()).unwrap();
            let (a, b) = (eval(&res, &p.env(), ops).unwrap(), eval(&reduced, &p.env(), ops).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn kernel_annihilates_every_rhs(seed in any::<u64>()) {
        let f = common::random_rhs_part(&mut rng(seed), 3).add(&Poly::var(Var::Ut).powi(2));
        for q in kernel(3) {
            prop_assert!(is_symmetry(&q, &f, 3).unwrap().is_zero(), "{} on {}", q, f);
        }
    }
}

#[test]
fn symbolic_and_numeric_verdicts_agree() {
    let p = CaseParams::default();
    for id in 0..CASE_COUNT {
        let f = case_f(id, &p).unwrap();
        let ops = case_operators(id, 3, &p).unwrap();
        let cfg = sampling_for(id);
        for (i, q) in ops.iter().enumerate() {
            if !is_symmetry(q, &f, 3).unwrap().is_zero() {
                continue;
            }
            let r = symmetry_residual(q, &f, 3).unwrap();
            let worst = max_sampled_residual(&r, &f, 3, &cfg.sampling, 100, i as u64);
            assert!(worst < 1e-8, "row {id} {q}: {worst}");
        }
    }
    let mut s = Session::new();
    parse_declarations("opaque h(ut)", &mut s).unwrap();
    for (q, f) in [("t*@t", "ut^2"), ("@u", "exp(u)*h(ut)"), ("u*@u", "exp(ut)"), ("x1*@x1", "ut^2 + 1")] {
        let q = parse_vector_field(q, 3, &s).unwrap();
        let f = parse_poly(f, &s).unwrap();
        assert!(is_symmetry(&q, &f, 3).unwrap().is_nonzero());
        let r = symmetry_residual(&q, &f, 3).unwrap();
        let worst = max_sampled_residual(&r, &f, 3, &SamplingConfig::default(), 100, 1);
        assert!(worst > 1e-4, "{q} on {f}: {worst}");
    }
}
