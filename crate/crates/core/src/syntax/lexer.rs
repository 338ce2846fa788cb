use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expr::Q;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Num(Q),
    Ident(String),
    /// `@t`, `@u`, `@x3`; the payload is the text after `@`.
    Marker(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Marker(s) => format!("`@{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
    /// Byte offset just past the token; used to detect adjacency.
    pub end: usize,
    pub start: usize,
}

pub fn syntax_error(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: msg.into(),
    }
}

/// Line and column (1-based, in characters) of a byte offset.
pub fn position_of(src: &str, offset: usize) -> Pos {
    let mut line = 1;
    let mut column = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    Pos { line, column }
}

/// Tokenizes `src[start..end]`; reported positions refer to all of `src`.
pub fn tokenize(src: &str, start: usize, end: usize) -> Result<Vec<Spanned>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = start;
    while i < end {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let pos = position_of(src, i);
        let s = i;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Spanned { tok, pos, start: s, end: i });
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < end && ((bytes[j] as char).is_ascii_digit() || bytes[j] == b'.') {
                j += 1;
            }
            let text = &src[i..j];
            let (int_part, frac) = match text.split_once('.') {
                Some((a, b)) => (a, b),
                None => (text, ""),
            };
            if frac.contains('.') || (int_part.is_empty() && frac.is_empty()) {
                return Err(syntax_error(pos, "malformed number"));
            }
            let digits = format!("{}{frac}", if int_part.is_empty() { "0" } else { int_part });
            let numer: BigInt = digits
                .parse()
                .map_err(|_| syntax_error(pos, "malformed number"))?;
            let denom = BigInt::from(10).pow(frac.len() as u32);
            i = j;
            out.push(Spanned {
                tok: Tok::Num(Q::new(numer, denom)),
                pos,
                start: s,
                end: i,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < end && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(src[i..j].to_string()),
                pos,
                start: s,
                end: j,
            });
            i = j;
            continue;
        }
        if c == '@' {
            let mut j = i + 1;
            while j < end && (bytes[j] as char).is_ascii_alphanumeric() {
                j += 1;
            }
            if j == i + 1 {
                return Err(syntax_error(pos, "expected a component name after `@`"));
            }
            out.push(Spanned {
                tok: Tok::Marker(src[i + 1..j].to_string()),
                pos,
                start: s,
                end: j,
            });
            i = j;
            continue;
        }
        let ch = src[i..].chars().next().unwrap();
        return Err(syntax_error(pos, format!("unexpected character `{ch}`")));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: position_of(src, end),
        start: end,
        end,
    });
    Ok(out)
}
