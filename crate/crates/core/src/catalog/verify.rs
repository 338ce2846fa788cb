use serde::Serialize;

use super::{algebra_dimension, case_f, case_operators, CaseParams, Dimension};
use crate::error::Result;
use crate::jet::{is_symmetry_with, max_sampled_residual, structure_constants, symmetry_residual, SymmetryConfig};

#[derive(Clone, Debug, Serialize)]
pub struct OperatorReport {
    pub field: String,
    pub verdict: String,
    /// Largest relative residual over the sampled jet points.
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub id: usize,
    pub n: usize,
    pub rhs: String,
    pub operators: Vec<OperatorReport>,
    /// None for the infinite-dimensional row.
    pub closed: Option<bool>,
    pub structure_constants: Option<Vec<Vec<Vec<String>>>>,
    pub dimension: Dimension,
    pub samples: usize,
    pub notes: Vec<String>,
    pub pass: bool,
}

pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 100,
            seed: 0,
            tol: RESIDUAL_TOL,
        }
    }
}

/// Rows with `tan u` or `cos^-2 u` are sampled away from the poles.
pub fn sampling_for(id: usize) -> SymmetryConfig {
    let mut cfg = SymmetryConfig::default();
    if matches!(id, 10 | 11) {
        cfg.sampling.u_range = Some((-1.2, 1.2));
    }
    cfg
}

/// Checks every operator of a row against its right-hand side, both
/// symbolically and at sampled jet points, and the closure of the basis.
pub fn verify_case(id: usize, n: usize, p: &CaseParams, samples: usize) -> Result<CaseReport> {
    verify_case_with(id, n, p, &VerifyConfig { samples, ..VerifyConfig::default() })
}

pub fn verify_case_with(id: usize, n: usize, p: &CaseParams, vc: &VerifyConfig) -> Result<CaseReport> {
    let samples = vc.samples;
    let f = case_f(id, p)?;
    let basis = case_operators(id, n, p)?;
    let cfg = sampling_for(id);
    let mut operators = Vec::new();
    let mut notes = Vec::new();
    let mut pass = true;
    for (i, q) in basis.iter().enumerate() {
        let verdict = is_symmetry_with(q, &f, n, &cfg)?;
        let r = symmetry_residual(q, &f, n)?;
        let worst = max_sampled_residual(&r, &f, n, &cfg.sampling, samples, vc.seed.wrapping_mul(1000).wrapping_add(100 + i as u64));
        if !verdict.is_zero() || !(worst <= vc.tol) {
            pass = false;
        }
        operators.push(OperatorReport {
            field: q.to_string(),
            verdict: verdict.label().to_string(),
            max_residual: worst,
        });
    }
    let dimension = algebra_dimension(id, n);
    let (closed, constants) = match dimension {
        Dimension::Infinite => (None, None),
        Dimension::Finite(k) => {
            if basis.len() != k {
                pass = false;
                notes.push(format!("basis has {} operators, expected {k}", basis.len()));
            }
            match structure_constants(&basis) {
                Ok(sc) => {
                    if sc.numeric_fallback {
                        notes.push("some brackets resolved by least squares".into());
                    }
                    let text = sc
                        .c
                        .iter()
                        .map(|row| row.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect())
                        .collect();
                    (Some(true), Some(text))
                }
                Err(e) => {
                    pass = false;
                    notes.push(e.to_string());
                    (Some(false), None)
                }
            }
        }
    };
    Ok(CaseReport {
        id,
        n,
        rhs: f.to_string(),
        operators,
        closed,
        structure_constants: constants,
        dimension,
        samples,
        notes,
        pass,
    })
}
