mod common;

use std::collections::BTreeMap;

use eikonal_core::expr::calculus::substitute;
use eikonal_core::expr::eval::{eval, eval_scaled};
use eikonal_core::expr::rational::qr;
use eikonal_core::expr::{diff, normalize, OpaqueTable, Poly, Var};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let e = common::random_tree(&mut rng(seed), 4);
        let once = normalize(&e);
        prop_assert_eq!(normalize(&once), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn differentiation_is_linear(seed in any::<u64>(), a in -5i64..5, b in 1i64..5, v in 0usize..3) {
        let mut r = rng(seed);
        let (e1, e2) = (common::random_expr(&mut r, 3), common::random_expr(&mut r, 3));
        let (ca, cb) = (qr(a, b), qr(b, a.abs() + 1));
        let v = common::VARS[v];
        let lhs = diff(&e1.scale(&ca).add(&e2.scale(&cb)), v);
        let rhs = diff(&e1, v).scale(&ca).add(&diff(&e2, v).scale(&cb));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_matches_finite_difference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = common::random_expr(&mut r, 4);
        let v = common::VARS[r.gen_range(0..3)];
        let env = common::random_point(&mut r);
        let ops = OpaqueTable::new();
        let h = 1e-5;
        let x = env.vars[&v];
        let (mut hi, mut lo) = (env.clone(), env.clone());
        hi.set(v, x + h);
        lo.set(v, x - h);
        let d = eval(&diff(&p, v), &env, &ops).unwrap();
        let fd = (eval(&p, &hi, &ops).unwrap() - eval(&p, &lo, &ops).unwrap()) / (2.0 * h);
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "{} d/d{}: {} vs {}", p, v.name(), d, fd);
    }

    #[test]
    fn substitution_commutes_with_eval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = common::random_expr(&mut r, 3);
        let sigma: BTreeMap<Var, Poly> = [(Var::T, common::random_expr(&mut r, 2)), (Var::U, common::random_expr(&mut r, 2))].into();
        let rho = common::random_point(&mut r);
        let ops = OpaqueTable::new();
        let (direct, scale) = eval_scaled(&substitute(&e, &sigma), &rho, &ops).unwrap();
        let mut inner = rho.clone();
        for (v, s) in &sigma {
            inner.set(*v, eval(s, &rho, &ops).unwrap());
        }
        let (composed, scale2) = eval_scaled(&e, &inner, &ops).unwrap();
        prop_assert!((direct - composed).abs() <= 1e-12 * scale.max(scale2).max(1.0), "{}: {} vs {}", e, direct, composed);
    }
}
