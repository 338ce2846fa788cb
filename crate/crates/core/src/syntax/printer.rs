use num_traits::{One, Signed};

use crate::expr::rational::fmt_q;
use crate::expr::{Atom, Expr, Poly, Q};

pub fn print_poly(p: &Poly) -> String {
    print_expr(&Expr::from_poly(p))
}

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Sum(terms) => {
            let mut s = String::new();
            for (i, t) in terms.iter().enumerate() {
                let (neg, body) = split_sign(t);
                if i == 0 {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                s.push_str(&body);
            }
            s
        }
        _ => {
            let (neg, body) = split_sign(e);
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
    }
}

/// Splits a leading negative coefficient off a term.
fn split_sign(e: &Expr) -> (bool, String) {
    match e {
        Expr::Rational(c) if c.is_negative() => (true, fmt_q(&-c)),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Rational(c)) if c.is_negative() => {
                let c = -c;
                let rest = &fs[1..];
                let mut parts: Vec<String> = Vec::new();
                if !c.is_one() {
                    parts.push(fmt_q(&c));
                }
                parts.extend(rest.iter().map(factor));
                (true, parts.join("*"))
            }
            _ => (false, fs.iter().map(factor).collect::<Vec<_>>().join("*")),
        },
        other => (false, factor_or_term(other)),
    }
}

fn factor_or_term(e: &Expr) -> String {
    match e {
        Expr::Sum(_) => print_expr(e),
        _ => factor(e),
    }
}

/// Renders a multiplicative factor.
fn factor(e: &Expr) -> String {
    match e {
        Expr::Sum(_) => format!("({})", print_expr(e)),
        Expr::Product(_) => print_expr(e),
        Expr::Rational(c) => fmt_q(c),
        Expr::Parameter(p) => p.name.to_string(),
        Expr::Variable(v) => v.name(),
        Expr::Power(b, x) => format!("{}^{}", power_base(b), exponent(x)),
        Expr::Apply(f, x) => format!("{}({})", f.name(), print_expr(x)),
        Expr::Opaque { name, args, derivs } => {
            let a = args.iter().map(print_expr).collect::<Vec<_>>().join(", ");
            if derivs.iter().all(|k| *k == 0) {
                format!("{name}({a})")
            } else {
                let d = derivs.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
                format!("{name}[{d}]({a})")
            }
        }
    }
}

fn is_natural(c: &Q) -> bool {
    c.is_integer() && !c.is_negative()
}

fn power_base(b: &Expr) -> String {
    match b {
        Expr::Rational(c) if is_natural(c) => fmt_q(c),
        Expr::Variable(_) | Expr::Parameter(_) | Expr::Apply(..) | Expr::Opaque { .. } => factor(b),
        _ => format!("({})", print_expr(b)),
    }
}

fn exponent(x: &Expr) -> String {
    match x {
        Expr::Rational(c) if is_natural(c) => fmt_q(c),
        Expr::Variable(_) | Expr::Parameter(_) => factor(x),
        _ => format!("({})", print_expr(x)),
    }
}

/// Renders `sum_k coeff_k * @marker_k` with terms in canonical order and
/// the marker written last in each term.
pub fn print_marked(p: &Poly, is_marker: &dyn Fn(&Atom) -> Option<String>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let mut marker = None;
        let mut rest = m.clone();
        for a in m.0.keys() {
            if let Some(name) = is_marker(a) {
                marker = Some(name);
                rest = m.without(a);
                break;
            }
        }
        let coeff = Expr::from_poly(&Poly::from_term(rest, c.clone()));
        let (neg, body) = split_sign(&coeff);
        let body = match &coeff {
            Expr::Sum(_) => format!("({})", print_expr(&coeff)),
            _ => body,
        };
        let body = match marker {
            None => body,
            Some(mk) if body == "1" => mk,
            Some(mk) => format!("{body}*{mk}"),
        };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}
