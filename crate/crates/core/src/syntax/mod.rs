//! Surface syntax. See `docs/grammar.md` in the repository for the
//! reference grammar.

pub mod lexer;
pub mod parser;
pub mod printer;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, Poly, Session, Var};
use crate::jet::VectorField;

pub use parser::{parse_declarations, parse_opaque_signature, parse_param_signature, parse_var, MARKER_PREFIX};
pub use printer::{print_expr, print_marked, print_poly};

use lexer::position_of;

/// Parses an expression; the result is normalized.
pub fn parse_expr(text: &str, session: &Session) -> Result<Expr> {
    Ok(Expr::from_poly(&parse_poly(text, session)?))
}

pub fn parse_poly(text: &str, session: &Session) -> Result<Poly> {
    parser::parse_poly_span(text, 0, text.len(), session, None)
}

fn marker_of(a: &Atom) -> Option<String> {
    match a {
        Atom::Param(p) if p.name.starts_with(MARKER_PREFIX) => Some(p.name[1..].to_string()),
        _ => None,
    }
}

/// Parses `c1*@t + c2*@u + c3*@x1 + ...` for space dimension `n`.
pub fn parse_vector_field(text: &str, n: usize, session: &Session) -> Result<VectorField> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let p = parser::parse_poly_span(text, 0, text.len(), session, Some(n))?;
    let start = position_of(text, text.len() - text.trim_start().len());
    let mut vf = VectorField::zero(n);
    for (m, c) in p.terms() {
        let markers: Vec<(&Atom, String)> = m.0.keys().filter_map(|a| marker_of(a).map(|s| (a, s))).collect();
        if markers.len() != 1 || m.0[markers[0].0] != crate::expr::rational::q(1) {
            return Err(Error::Syntax {
                line: start.line,
                column: start.column,
                message: format!(
                    "vector field must be linear in the markers; offending term {}",
                    print_poly(&Poly::from_term(m.clone(), c.clone()))
                ),
            });
        }
        let (atom, name) = &markers[0];
        let coeff = Poly::from_term(m.without(atom), c.clone());
        if coeff.depends_on(Var::Ut) || (1..=9).any(|k| coeff.depends_on(Var::Ux(k))) {
            return Err(Error::IllegalDependence(format!(
                "vector field coefficient {} depends on a derivative variable",
                print_poly(&coeff)
            )));
        }
        let slot = match name.as_str() {
            "t" => &mut vf.xi0,
            "u" => &mut vf.eta,
            other => match parse_var(other) {
                Some(Var::X(k)) => &mut vf.xi[k as usize - 1],
                _ => unreachable!("marker validated by the parser"),
            },
        };
        *slot = slot.add(&coeff);
    }
    Ok(vf)
}

/// The five (or six) expressions of a transformation specification.
#[derive(Clone, Debug)]
pub struct TransformSpec {
    pub zeta: Poly,
    pub phi: Poly,
    pub delta: Poly,
    pub zeta_inv: Poly,
    pub phi_inv: Poly,
    pub delta_hat: Option<Poly>,
}

/// Parses `zeta = ...; phi = ...; delta = ...; zeta_inv = ...; phi_inv = ...`
/// with an optional `delta_hat = ...`. Entries are separated by `;` or
/// newlines; the inverse pair is written in `t`, `u` standing for the new
/// variables.
pub fn parse_transform_spec(text: &str, session: &Session) -> Result<TransformSpec> {
    let mut entries: Vec<(String, Poly)> = Vec::new();
    let bytes = text.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i <= bytes.len() {
        if i == bytes.len() || bytes[i] == b';' || bytes[i] == b'\n' {
            let piece = &text[start..i];
            if !piece.trim().is_empty() && !piece.trim_start().starts_with('#') {
                let Some(eq) = piece.find('=') else {
                    let p = position_of(text, start + (piece.len() - piece.trim_start().len()));
                    return Err(lexer::syntax_error(p, "expected `key = expression`"));
                };
                let key = piece[..eq].trim().to_string();
                let kpos = position_of(text, start + (piece.len() - piece.trim_start().len()));
                if !["zeta", "phi", "delta", "zeta_inv", "phi_inv", "delta_hat"].contains(&key.as_str()) {
                    return Err(lexer::syntax_error(kpos, format!("unknown key `{key}`")));
                }
                if entries.iter().any(|(k, _)| *k == key) {
                    return Err(lexer::syntax_error(kpos, format!("duplicate key `{key}`")));
                }
                let value = parser::parse_poly_span(text, start + eq + 1, i, session, None)?;
                entries.push((key, value));
            }
            start = i + 1;
        }
        i += 1;
    }
    let mut take = |k: &str| -> Option<Poly> {
        let idx = entries.iter().position(|(key, _)| key == k)?;
        Some(entries.remove(idx).1)
    };
    let end = position_of(text, text.len());
    let need = |k: &str, v: Option<Poly>| {
        v.ok_or_else(|| lexer::syntax_error(end, format!("missing `{k}`")))
    };
    let zeta = take("zeta");
    let phi = take("phi");
    let delta = take("delta");
    let zeta_inv = take("zeta_inv");
    let phi_inv = take("phi_inv");
    let delta_hat = take("delta_hat");
    Ok(TransformSpec {
        zeta: need("zeta", zeta)?,
        phi: need("phi", phi)?,
        delta: need("delta", delta)?,
        zeta_inv: need("zeta_inv", zeta_inv)?,
        phi_inv: need("phi_inv", phi_inv)?,
        delta_hat,
    })
}

/// Renders a vector field as `c*@t + ... ` with markers last.
pub fn print_vector_field(vf: &VectorField) -> String {
    print_marked(&vf.as_marked_poly(), &|a| marker_of(a).map(|s| format!("{MARKER_PREFIX}{s}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Sign;

    fn session() -> Session {
        let mut s = Session::new();
        s.declare_opaque("h", &[Var::Ut]).unwrap();
        s.declare_opaque("f", &[Var::U, Var::Ut]).unwrap();
        s.declare_param("m", Sign::Any).unwrap();
        s
    }

    #[test]
    fn parse_examples() {
        let s = session();
        let e = parse_expr("exp(u)*h(ut)", &s).unwrap();
        assert_eq!(print_expr(&e), "exp(u)*h(ut)");
        assert_eq!(parse_expr("((t))", &s).unwrap(), Expr::Variable(Var::T));
        assert_eq!(print_poly(&parse_poly("ut^2 - 1", &s).unwrap()), "ut^2 - 1");
        assert_eq!(print_poly(&parse_poly("-3/2*ut", &s).unwrap()), "-3/2*ut");
        assert_eq!(print_poly(&parse_poly("u^-1", &s).unwrap()), "u^(-1)");
        assert_eq!(print_poly(&parse_poly("f[1,0](u, ut)", &s).unwrap()), "f[1,0](u, ut)");
    }

    #[test]
    fn precedence() {
        let s = session();
        let a = parse_poly("-u^2", &s).unwrap();
        let u = Poly::var(Var::U);
        assert_eq!(a, u.powi(2).neg());
        let b = parse_poly("2^3^2", &s).unwrap();
        assert_eq!(b, Poly::int(512));
        let c = parse_poly("1 - u/2*t", &s).unwrap();
        assert_eq!(c, Poly::one().sub(&u.mul(&Poly::var(Var::T)).scale(&crate::expr::rational::qr(1, 2))));
    }

    #[test]
    fn vector_fields() {
        let s = session();
        let j = parse_vector_field("x1*@x2 - x2*@x1", 2, &s).unwrap();
        assert_eq!(print_vector_field(&j), "x1*@x2 - x2*@x1");
        let d = parse_vector_field("t*@t + u*@u + x1*@x1 + x2*@x2", 2, &s).unwrap();
        assert_eq!(d.xi0, Poly::var(Var::T));
        assert_eq!(parse_vector_field("@u", 3, &s).unwrap().eta, Poly::one());
        assert!(matches!(parse_vector_field("@x3", 2, &s), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(parse_vector_field("ut*@t", 2, &s), Err(Error::IllegalDependence(_))));
        assert!(matches!(parse_vector_field("@t*@u", 2, &s), Err(Error::Syntax { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        let s = session();
        match parse_poly("2ut", &s) {
            Err(Error::Syntax { line: 1, column: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_poly("q + 1", &s), Err(Error::UndeclaredSymbol("q".into())));
    }

    #[test]
    fn transform_spec() {
        let s = session();
        let spec = parse_transform_spec("zeta = t + u; phi = t - u; delta = 1; zeta_inv = (t+u)/2; phi_inv = (t-u)/2", &s).unwrap();
        assert_eq!(spec.zeta, Poly::var(Var::T).add(&Poly::var(Var::U)));
        assert!(spec.delta_hat.is_none());
        assert!(parse_transform_spec("zeta = t", &s).is_err());
    }
}
