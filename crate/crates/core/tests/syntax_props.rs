mod common;

use eikonal_core::expr::Session;
use eikonal_core::syntax::{parse_declarations, parse_poly, print_poly};
use eikonal_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;

fn session() -> Session {
    let mut s = Session::new();
    parse_declarations("opaque h(ut)\nparam m", &mut s).unwrap();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let p = common::random_expr(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed), 4);
        let text = print_poly(&p);
        prop_assert_eq!(parse_poly(&text, &session()).unwrap(), p, "{}", text);
    }
}

#[test]
fn malformed_inputs_report_positions() {
    let cases: [(&str, usize, usize); 20] = [
        ("ut +\n  )", 2, 3),
        ("ut +", 1, 5),
        ("* ut", 1, 1),
        ("(ut", 1, 4),
        ("ut)", 1, 3),
        ("ut^^2", 1, 4),
        ("exp()", 1, 5),
        ("exp(ut, u)", 1, 7),
        ("sin ut", 1, 5),
        ("h(ut", 1, 5),
        ("2..5", 1, 1),
        ("ut $ 1", 1, 4),
        ("x1 x2", 1, 4),
        ("ut^", 1, 4),
        ("1//2", 1, 3),
        ("u,t", 1, 2),
        ("exp(ut))", 1, 8),
        ("h()", 1, 3),
        ("ut + @t", 1, 6),
        ("1/0", 1, 2),
    ];
    let s = session();
    for (text, line, column) in cases {
        match parse_poly(text, &s) {
            Err(Error::Syntax { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn undeclared_symbols_rejected() {
    let s = session();
    for text in ["g(ut)", "k*ut", "ux0"] {
        assert!(matches!(parse_poly(text, &s), Err(Error::UndeclaredSymbol(_))), "{text}");
    }
}
