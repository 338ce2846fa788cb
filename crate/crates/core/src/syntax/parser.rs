use std::sync::Arc;

use num_traits::ToPrimitive;

use super::lexer::{syntax_error, tokenize, Pos, Spanned, Tok};
use crate::error::{Error, Result};
use crate::expr::{Atom, Func, Opaque, Param, Poly, Session, Sign, Var};

/// Name prefix of the marker parameters standing for `@t`, `@u`, `@xk`
/// while a vector field is being parsed.
pub const MARKER_PREFIX: char = '@';

pub struct Parser<'a> {
    toks: Vec<Spanned>,
    i: usize,
    session: &'a Session,
    /// Space dimension when markers and bounded `xk` are allowed.
    field_n: Option<usize>,
}

pub fn parse_var(name: &str) -> Option<Var> {
    match name {
        "t" => return Some(Var::T),
        "u" => return Some(Var::U),
        "ut" => return Some(Var::Ut),
        _ => {}
    }
    let (prefix, digits) = if let Some(d) = name.strip_prefix("ux") {
        ("ux", d)
    } else if let Some(d) = name.strip_prefix('x') {
        ("x", d)
    } else {
        return None;
    };
    if digits.len() != 1 {
        return None;
    }
    let k = digits.parse::<u8>().ok()?;
    if k == 0 {
        return None;
    }
    Some(if prefix == "x" { Var::X(k) } else { Var::Ux(k) })
}

pub fn marker_param(component: &str) -> Poly {
    Poly::from_atom(Atom::Param(Param {
        name: format!("{MARKER_PREFIX}{component}").into(),
        sign: Sign::Any,
    }))
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, start: usize, end: usize, session: &'a Session, field_n: Option<usize>) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src, start, end)?,
            i: 0,
            session,
            field_n,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.i]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned> {
        let t = self.peek().clone();
        if t.tok == tok {
            Ok(self.bump())
        } else {
            Err(syntax_error(
                t.pos,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            ))
        }
    }

    pub fn parse_complete(&mut self) -> Result<Poly> {
        if self.peek().tok == Tok::Eof {
            return Err(syntax_error(self.peek().pos, "empty expression"));
        }
        let p = self.sum()?;
        let t = self.peek();
        if t.tok != Tok::Eof {
            return Err(syntax_error(t.pos, format!("unexpected {}", t.tok.describe())));
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = self.product()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Slash => {
                    let pos = self.bump().pos;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(syntax_error(pos, "division by literal zero"));
                    }
                    acc = acc.mul(&d.powi(-1));
                }
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen | Tok::Marker(_) => {
                    return Err(syntax_error(
                        self.peek().pos,
                        "implicit multiplication is not allowed; use `*`",
                    ));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let e = self.unary()?;
            return Ok(base.pow_poly(&e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly> {
        let t = self.bump();
        match t.tok {
            Tok::Num(c) => Ok(Poly::constant(c)),
            Tok::LParen => {
                let p = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Marker(name) => self.marker(&name, t.pos),
            Tok::Ident(name) => self.ident(&name, t.pos),
            other => Err(syntax_error(t.pos, format!("unexpected {}", other.describe()))),
        }
    }

    fn marker(&mut self, name: &str, pos: Pos) -> Result<Poly> {
        let Some(n) = self.field_n else {
            return Err(syntax_error(pos, "component marker outside a vector field"));
        };
        match name {
            "t" | "u" => Ok(marker_param(name)),
            _ => match parse_var(name) {
                Some(Var::X(k)) => {
                    if k as usize > n {
                        Err(Error::IndexOutOfRange(format!(
                            "@x{k} with n = {n} at {}:{}",
                            pos.line, pos.column
                        )))
                    } else {
                        Ok(marker_param(name))
                    }
                }
                _ => Err(syntax_error(pos, format!("unknown component marker `@{name}`"))),
            },
        }
    }

    fn ident(&mut self, name: &str, pos: Pos) -> Result<Poly> {
        if let Some(v) = parse_var(name) {
            if let (Var::X(k) | Var::Ux(k), Some(n)) = (v, self.field_n) {
                if k as usize > n {
                    return Err(Error::IndexOutOfRange(format!(
                        "{name} with n = {n} at {}:{}",
                        pos.line, pos.column
                    )));
                }
            }
            return Ok(Poly::var(v));
        }
        if let Some(f) = Func::from_name(name) {
            if self.peek().tok != Tok::LParen {
                return Err(syntax_error(self.peek().pos, format!("expected `(` after `{name}`")));
            }
            self.bump();
            let arg = self.sum()?;
            self.expect(Tok::RParen)?;
            return Ok(arg.apply(f));
        }
        if let Some(decl) = self.session.opaque(name) {
            let arity = decl.arity();
            let mut derivs = vec![0u32; arity];
            if self.peek().tok == Tok::LBracket {
                let lb = self.bump().pos;
                let mut ks = Vec::new();
                loop {
                    let t = self.bump();
                    match t.tok {
                        Tok::Num(c) if c.is_integer() => {
                            ks.push(c.to_integer().to_u32().ok_or_else(|| {
                                syntax_error(t.pos, "derivative order out of range")
                            })?)
                        }
                        other => {
                            return Err(syntax_error(
                                t.pos,
                                format!("expected derivative order, found {}", other.describe()),
                            ))
                        }
                    }
                    let t = self.bump();
                    match t.tok {
                        Tok::Comma => continue,
                        Tok::RBracket => break,
                        other => {
                            return Err(syntax_error(
                                t.pos,
                                format!("expected `,` or `]`, found {}", other.describe()),
                            ))
                        }
                    }
                }
                if ks.len() != arity {
                    return Err(syntax_error(
                        lb,
                        format!("`{name}` takes {arity} derivative orders, found {}", ks.len()),
                    ));
                }
                derivs = ks;
            }
            let lp = self.peek().pos;
            self.expect(Tok::LParen)?;
            let mut args = vec![self.sum()?];
            while self.peek().tok == Tok::Comma {
                self.bump();
                args.push(self.sum()?);
            }
            self.expect(Tok::RParen)?;
            if args.len() != arity {
                return Err(syntax_error(
                    lp,
                    format!("`{name}` takes {arity} arguments, found {}", args.len()),
                ));
            }
            return Ok(Poly::from_atom(Atom::Opaque(Arc::new(Opaque {
                name: name.into(),
                args,
                derivs,
            }))));
        }
        if let Some(sign) = self.session.param(name) {
            return Ok(Poly::param(name, sign));
        }
        if self.peek().tok == Tok::LParen {
            return Err(Error::UndeclaredSymbol(format!(
                "{name} (declare it with `opaque {name}(...)`)"
            )));
        }
        Err(Error::UndeclaredSymbol(name.to_string()))
    }
}

pub fn parse_poly_span(src: &str, start: usize, end: usize, session: &Session, field_n: Option<usize>) -> Result<Poly> {
    Parser::new(src, start, end, session, field_n)?.parse_complete()
}

/// Parses `name(arg, ...)` with formal arguments drawn from t, u, ut.
pub fn parse_opaque_signature(text: &str) -> Result<(String, Vec<Var>)> {
    let toks = tokenize(text, 0, text.len())?;
    let mut it = toks.into_iter();
    let first = it.next().unwrap();
    let name = match first.tok {
        Tok::Ident(s) => s,
        other => return Err(syntax_error(first.pos, format!("expected a symbol name, found {}", other.describe()))),
    };
    if parse_var(&name).is_some() || Func::from_name(&name).is_some() {
        return Err(syntax_error(first.pos, format!("`{name}` is reserved")));
    }
    let lp = it.next().unwrap();
    if lp.tok != Tok::LParen {
        return Err(syntax_error(lp.pos, format!("expected `(`, found {}", lp.tok.describe())));
    }
    let mut formals = Vec::new();
    loop {
        let t = it.next().unwrap();
        match &t.tok {
            Tok::Ident(a) => match parse_var(a) {
                Some(v @ (Var::T | Var::U | Var::Ut)) => {
                    if formals.contains(&v) {
                        return Err(syntax_error(t.pos, format!("duplicate formal argument `{a}`")));
                    }
                    formals.push(v)
                }
                _ => return Err(syntax_error(t.pos, format!("formal argument must be t, u or ut, found `{a}`"))),
            },
            other => return Err(syntax_error(t.pos, format!("expected a formal argument, found {}", other.describe()))),
        }
        let t = it.next().unwrap();
        match t.tok {
            Tok::Comma => continue,
            Tok::RParen => break,
            other => return Err(syntax_error(t.pos, format!("expected `,` or `)`, found {}", other.describe()))),
        }
    }
    let t = it.next().unwrap();
    if t.tok != Tok::Eof {
        return Err(syntax_error(t.pos, format!("unexpected {}", t.tok.describe())));
    }
    Ok((name, formals))
}

/// Parses `NAME`, `NAME positive` or `NAME negative`.
pub fn parse_param_signature(text: &str) -> Result<(String, Sign)> {
    let mut words = text.split_whitespace();
    let pos = Pos { line: 1, column: 1 };
    let name = words.next().ok_or_else(|| syntax_error(pos, "expected a parameter name"))?;
    let valid = name.chars().next().map_or(false, |c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid || parse_var(name).is_some() || Func::from_name(name).is_some() {
        return Err(syntax_error(pos, format!("`{name}` is not a valid parameter name")));
    }
    let sign = match words.next() {
        None => Sign::Any,
        Some("positive") => Sign::Positive,
        Some("negative") => Sign::Negative,
        Some(w) => {
            let col = text.find(w).unwrap_or(0) + 1;
            return Err(syntax_error(Pos { line: 1, column: col }, format!("unknown sign qualifier `{w}`")));
        }
    };
    if let Some(w) = words.next() {
        let col = text.rfind(w).unwrap_or(0) + 1;
        return Err(syntax_error(Pos { line: 1, column: col }, format!("unexpected `{w}`")));
    }
    Ok((name.to_string(), sign))
}

/// Applies `param ...` and `opaque ...` lines to the session; blank lines
/// and lines starting with `#` are skipped.
pub fn parse_declarations(text: &str, session: &mut Session) -> Result<()> {
    for (ln, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let relocate = |e: Error, kw: usize| match e {
            Error::Syntax { column, message, .. } => Error::Syntax {
                line: ln + 1,
                column: column + indent + kw,
                message,
            },
            other => other,
        };
        if let Some(rest) = trimmed.strip_prefix("param ") {
            let (name, sign) = parse_param_signature(rest).map_err(|e| relocate(e, 6))?;
            session.declare_param(&name, sign)?;
        } else if let Some(rest) = trimmed.strip_prefix("opaque ") {
            let (name, formals) = parse_opaque_signature(rest).map_err(|e| relocate(e, 7))?;
            session.declare_opaque(&name, &formals)?;
        } else {
            return Err(Error::Syntax {
                line: ln + 1,
                column: indent + 1,
                message: "expected `param` or `opaque` declaration".into(),
            });
        }
    }
    Ok(())
}
