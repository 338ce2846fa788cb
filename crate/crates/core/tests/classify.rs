use eikonal_core::classify::{classify, classify_quadratic, extract_quadratic, rational_fit, match_template, ut_cubic_test, Confidence};
use eikonal_core::equiv::QuadraticForm;
use eikonal_core::expr::{Poly, Session};
use eikonal_core::syntax::{parse_declarations, parse_poly};

fn parse(decls: &str, text: &str) -> Poly {
    let mut s = Session::new();
    parse_declarations(decls, &mut s).unwrap();
    parse_poly(text, &s).unwrap()
}

fn p(text: &str) -> Poly {
    parse("opaque h(ut)\nparam m positive", text)
}

#[test]
fn cubic_test_examples() {
    assert!(ut_cubic_test(&p("ut^2 - 1")).unwrap());
    assert!(!ut_cubic_test(&p("exp(ut)")).unwrap());
    assert!(ut_cubic_test(&p("2*m*ut")).unwrap());
}

#[test]
fn extract_examples() {
    let q = extract_quadratic(&p("ut^2 - 1")).unwrap();
    assert_eq!((q.a, q.b, q.c), (Poly::int(1), Poly::int(0), Poly::int(-1)));
    let q = extract_quadratic(&p("2*m*ut")).unwrap();
    assert_eq!(q.b, p("2*m"));
    assert!(q.a.is_zero() && q.c.is_zero());
    let q = extract_quadratic(&p("exp(u)*ut^2 + 1")).unwrap();
    assert_eq!(q.a, p("exp(u)"));
    assert!(extract_quadratic(&p("exp(ut)")).is_err());
}

#[test]
fn quadratic_examples() {
    let c = classify_quadratic(&QuadraticForm::from_ints(1, 0, -1).unwrap()).unwrap();
    assert_eq!(c.case_id, 8);
    assert_eq!((c.param("eps1").cloned(), c.param("eps2").cloned()), (Some(Poly::int(-1)), Some(Poly::int(1))));
    let c = classify_quadratic(&QuadraticForm::from_ints(0, 1, 0).unwrap()).unwrap();
    assert_eq!(c.case_id, 8);
    assert_eq!(c.chain.last().unwrap().name, "sum-difference");
    assert_eq!(c.normalized, Some(p("1 - ut^2")));
    let q = QuadraticForm::new(p("cosh(u)^(-2)"), Poly::zero(), Poly::one()).unwrap();
    let c = classify_quadratic(&q).unwrap();
    assert_eq!(c.case_id, 12);
    assert_eq!(c.param("eps0"), Some(&Poly::int(1)));
    assert_eq!(c.param("c0"), Some(&Poly::int(4)));
    assert_eq!(c.param("c1"), Some(&Poly::int(-4)));
    let q = QuadraticForm::new(p("exp(u^2)"), Poly::zero(), Poly::one()).unwrap();
    let c = classify_quadratic(&q).unwrap();
    assert_eq!((c.case_id, c.param("delta").cloned()), (1, Some(Poly::zero())));
}

#[test]
fn rational_fit_examples() {
    for (f, want) in [("exp(ut)", [0, 0, 1, 1]), ("ut^3", [0, 1, 0, 3]), ("ut^2*exp(1/ut)", [1, 0, 0, -1])] {
        let fit = rational_fit(&p(f)).unwrap();
        let got = [&fit.a, &fit.b, &fit.c, &fit.d];
        for (g, w) in got.iter().zip(want) {
            assert_eq!(**g, Poly::int(w), "{f}");
        }
        assert!(fit.residual(&p(f)).is_zero() || eikonal_core::expr::symbolic_zero(&fit.residual(&p(f))));
    }
}

#[test]
fn template_examples() {
    assert_eq!(match_template(&parse("", "exp(3*t)*(u^2 + ut)")).unwrap().0, 1);
    assert_eq!(match_template(&p("5*exp(ut)")).unwrap().0, 5);
    assert_eq!(match_template(&p("ut^3")).unwrap().0, 6);
}

#[test]
fn named_cases() {
    let cases = [
        ("ut^2", 7),
        ("ut^2 - 1", 8),
        ("2*m*ut", 8),
        ("exp(ut)", 5),
        ("ut^3", 6),
        ("exp(u)*h(ut)", 2),
        ("exp(u)*ut^3", 6),
        ("cosh(u)^(-2)*ut^2 + 1", 12),
        ("exp(3*t)*(u^2 + ut)", 1),
    ];
    for (f, id) in cases {
        let c = classify(&p(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert_eq!(c.case_id, id, "{f}: {:?}", c.notes);
    }
}

#[test]
fn exponent_rescaled() {
    let c = classify(&parse("", "exp(3*t)*(u^2 + ut)")).unwrap();
    assert_eq!(c.case_id, 1);
    assert_eq!(c.param("delta"), Some(&Poly::int(1)));
    assert!(c.normalized.is_some());
}

#[test]
fn proved_when_symbolic() {
    let c = classify(&p("ut^2 - 1")).unwrap();
    assert_eq!(c.confidence, Confidence::Proved);
    assert!(c.normalized.is_some());
}

#[test]
fn round_trip_under_catalog_transforms() {
    use eikonal_core::catalog::{case_f, CaseParams};
    use eikonal_core::equiv::{reduction_catalog, transform_f};
    use eikonal_core::expr::rational::qr;
    use rand::{Rng, SeedableRng};
    let names = ["x-scale", "t-translate", "u-translate", "t-scale", "u-scale"];
    let slot = |n: &str| if n == "x-scale" { "delta" } else { "k" };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for id in 1..=12 {
        let f = case_f(id, &CaseParams::default()).unwrap();
        for _ in 0..3 {
            let name = names[rng.gen_range(0..names.len())];
            let v = [qr(1, 2), qr(2, 1), qr(3, 2), qr(-1, 3), qr(1, 3)][rng.gen_range(0..5)].clone();
            let params = [(slot(name).to_string(), Poly::constant(v.clone()))].into();
            let tr = reduction_catalog(name, &params).unwrap();
            let g = transform_f(&f, &tr).unwrap();
            let c = classify(&g).unwrap_or_else(|e| panic!("row {id} {name}({v}): {g}: {e}"));
            assert_eq!(c.case_id, id, "row {id} {name}({v}): {g}: {:?}", c.notes);
        }
    }
}

#[test]
fn proved_classifications_pass_verification() {
    use eikonal_core::catalog::verify_case;
    let inputs = [
        "ut^2 - 1",
        "2*m*ut",
        "exp(ut)",
        "ut^3",
        "exp(u)*h(ut)",
        "cosh(u)^(-2)*ut^2 + 1",
        "exp(3*t)*(u^2 + ut)",
        "3*exp(u)*ut^2 - 2",
        "cos(u)^(-2)*ut^2 + 1",
    ];
    let mut proved = 0;
    for f in inputs {
        let c = classify(&p(f)).unwrap();
        if c.confidence != Confidence::Proved || c.case_id == 7 {
            continue;
        }
        proved += 1;
        let params = c.case_params().unwrap_or_else(|| panic!("{f}: no parameters"));
        let rep = verify_case(c.case_id, 3, &params, 50).unwrap();
        assert!(rep.pass, "{f} -> row {}: {:?}", c.case_id, rep.notes);
    }
    assert!(proved >= 6, "only {proved} proved");
}

#[test]
fn sign_class_survives_rescaling_for_trigonometric_rows() {
    use eikonal_core::catalog::{case_f, CaseParams};
    use eikonal_core::equiv::{reduction_catalog, transform_f};
    use eikonal_core::expr::rational::qr;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let names = ["x-scale", "t-scale", "t-translate", "u-translate"];
    for (id, pm) in [(10, 1), (11, 1), (11, -1), (12, 1)] {
        let params = CaseParams { pm, ..CaseParams::default() };
        let f = case_f(id, &params).unwrap();
        let base = classify(&f).unwrap();
        assert_eq!(base.case_id, id);
        for _ in 0..10 {
            let name = names[rng.gen_range(0..names.len())];
            let v = [qr(1, 2), qr(2, 1), qr(3, 2), qr(-1, 3), qr(5, 4)][rng.gen_range(0..5)].clone();
            let slot = if name == "x-scale" { "delta" } else { "k" };
            let tr = reduction_catalog(name, &[(slot.to_string(), Poly::constant(v.clone()))].into()).unwrap();
            let g = transform_f(&f, &tr).unwrap();
            let c = classify(&g).unwrap_or_else(|e| panic!("row {id} {name}({v}): {e}"));
            assert_eq!(c.case_id, id, "row {id} {name}({v}): {g}");
            assert_eq!(c.param("pm"), base.param("pm"), "row {id} {name}({v}): {g}");
        }
    }
}

mod fit {
    use super::*;
    use eikonal_core::expr::rational::qr;
    use eikonal_core::expr::{symbolic_zero, Var};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn fit_reproduces_log_derivative(kind in 0usize..3, a in 1i64..5, b in 1i64..4, s in -3i64..3) {
            let ut = Poly::var(Var::Ut);
            let k = Poly::constant(qr(a, b));
            let f = match kind {
                0 => k.mul(&ut).exp().mul(&Poly::int(s.abs() + 1)),
                1 => ut.add(&Poly::int(s)).pow_q(&qr(a, b)),
                _ => ut.powi(2).mul(&k.mul(&ut.powi(-1)).exp()),
            };
            let fit = rational_fit(&f).unwrap();
            let r = fit.residual(&f);
            prop_assert!(r.is_zero() || symbolic_zero(&r), "{}: {}", f, r);
        }
    }
}
