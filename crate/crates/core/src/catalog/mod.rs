//! The classification table as data: right-hand side templates, parameter
//! constraints, operator bases and algebra dimensions.

mod operators;
mod verify;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use operators::{case7_field, case_operators, kernel, Case7Params};
pub use verify::{sampling_for, verify_case, verify_case_with, CaseReport, OperatorReport, VerifyConfig, RESIDUAL_TOL};

use crate::error::{Error, Result};
use crate::expr::rational::{q, Q};
use crate::expr::{substitute_params, Poly, Session};
use crate::syntax::{parse_declarations, parse_poly};

pub const CASE_COUNT: usize = 13;

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RowData {
    pub id: usize,
    pub declarations: Vec<String>,
    pub template: String,
    pub constraints: Vec<String>,
    pub operators: Vec<String>,
    pub dimension: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TableData {
    pub version: u32,
    pub rows: Vec<RowData>,
}

pub const TABLE_JSON: &str = include_str!("../../resources/table1.json");

pub fn table() -> &'static TableData {
    static TABLE: OnceLock<TableData> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(TABLE_JSON).expect("embedded table is valid JSON"))
}

pub fn row(id: usize) -> Result<&'static RowData> {
    table()
        .rows
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::IndexOutOfRange(format!("case {id}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Finite(usize),
    Infinite,
}

impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(k) => s.serialize_u64(*k as u64),
            Dimension::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(k) => write!(f, "{k}"),
            Dimension::Infinite => write!(f, "infinite"),
        }
    }
}

/// Parameter values for the rows that have them. Rows ignore the fields
/// they do not use.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseParams {
    pub delta: Q,
    pub beta: Q,
    pub eps1: i64,
    pub eps2: i64,
    /// Sign in front of row 11.
    pub pm: i64,
    pub case7: Case7Params,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            delta: q(1),
            beta: q(3),
            eps1: 1,
            eps2: 1,
            pm: 1,
            case7: Case7Params::constant_c0(),
        }
    }
}

fn unit_sign(name: &str, v: i64) -> Result<()> {
    if v == 1 || v == -1 {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("{name} must be 1 or -1, got {v}")))
    }
}

/// Checks the row's constraints on the parameters.
pub fn check_constraints(id: usize, p: &CaseParams) -> Result<()> {
    match id {
        1 if p.delta != q(0) && p.delta != q(1) => {
            Err(Error::ConstraintViolation(format!("row 1 needs delta in {{0, 1}}, got {}", p.delta)))
        }
        3 if p.delta == q(2) => Err(Error::ConstraintViolation("row 3 needs delta != 2".into())),
        6 if [q(0), q(1), q(2)].contains(&p.beta) => {
            Err(Error::ConstraintViolation(format!("row 6 needs beta not in {{0, 1, 2}}, got {}", p.beta)))
        }
        8 | 9 => {
            unit_sign("eps1", p.eps1)?;
            unit_sign("eps2", p.eps2)?;
            if p.eps1 == -1 && p.eps2 == -1 {
                return Err(Error::ConstraintViolation("(eps1, eps2) = (-1, -1) is excluded".into()));
            }
            Ok(())
        }
        11 => unit_sign("pm", p.pm),
        id if id >= CASE_COUNT => Err(Error::IndexOutOfRange(format!("case {id}"))),
        _ => Ok(()),
    }
}

/// The session in which a row's template is written.
pub fn row_session(id: usize) -> Result<Session> {
    let mut s = Session::new();
    parse_declarations(&row(id)?.declarations.join("\n"), &mut s)?;
    Ok(s)
}

fn param_values(p: &CaseParams) -> BTreeMap<String, Poly> {
    [
        ("delta", Poly::constant(p.delta.clone())),
        ("beta", Poly::constant(p.beta.clone())),
        ("eps1", Poly::int(p.eps1)),
        ("eps2", Poly::int(p.eps2)),
        ("pm", Poly::int(p.pm)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// The row's right-hand side with its parameters substituted; opaque
/// functions stay symbolic.
pub fn case_f(id: usize, p: &CaseParams) -> Result<Poly> {
    check_constraints(id, p)?;
    let r = row(id)?;
    let template = parse_poly(&r.template, &row_session(id)?)?;
    Ok(substitute_params(&template, &param_values(p)))
}

pub fn kernel_dimension(n: usize) -> usize {
    n + n * (n - 1) / 2
}

pub fn algebra_dimension(id: usize, n: usize) -> Dimension {
    let k = kernel_dimension(n);
    Dimension::Finite(match id {
        0 => k,
        1 => k + 1,
        2 | 3 => k + 2,
        4 | 9 | 10 | 11 | 12 => k + 3,
        5 | 6 => k + 4,
        7 => return Dimension::Infinite,
        8 => k + 3 * n + 6,
        _ => 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{opaque_app, Var};

    #[test]
    fn templates() {
        let mut p = CaseParams::default();
        let ut = Poly::var(Var::Ut);
        assert_eq!(case_f(9, &p).unwrap(), Poly::var(Var::U).exp().mul(&ut.powi(2)).add(&Poly::one()));
        assert_eq!(case_f(4, &p).unwrap(), opaque_app("h", vec![ut]));
        p.beta = q(2);
        assert!(matches!(case_f(6, &p), Err(Error::ConstraintViolation(_))));
        assert_eq!(algebra_dimension(0, 3), Dimension::Finite(6));
        assert_eq!(algebra_dimension(8, 3), Dimension::Finite(21));
        assert_eq!(algebra_dimension(7, 3), Dimension::Infinite);
    }
}

