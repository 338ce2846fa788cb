use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{lie_bracket, VectorField};
use crate::error::{Error, Result};
use crate::expr::eval::eval;
use crate::expr::rational::rationalize;
use crate::expr::zero::{symbolic_zero, trig_normal};
use crate::expr::{Env, Monomial, OpaqueTable, Poly, Var, Q};
use crate::linalg;

/// `c[i][j][k]` with `[Q_i, Q_j] = sum_k c[i][j][k] Q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub c: Vec<Vec<Vec<Q>>>,
    /// True when some bracket needed the numeric fallback.
    pub numeric_fallback: bool,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.c.len()
    }
}

/// Brings every marked polynomial into one comparable normal form: the
/// identity rewriting of the zero test, a common denominator shared by all
/// of them, then the sine-square reduction.
fn common_forms(polys: &[Poly]) -> Vec<Poly> {
    let rewritten: Vec<Poly> = polys.iter().map(trig_normal).collect();
    let mut mins: BTreeMap<crate::expr::Atom, Q> = BTreeMap::new();
    for p in &rewritten {
        for (m, _) in p.terms() {
            for (a, e) in &m.0 {
                if e < &Q::zero() {
                    let slot = mins.entry(a.clone()).or_insert_with(Q::zero);
                    if e < slot {
                        *slot = e.clone();
                    }
                }
            }
        }
    }
    let factor: BTreeMap<crate::expr::Atom, Q> = mins.into_iter().map(|(a, e)| (a, -e)).collect();
    rewritten
        .iter()
        .map(|p| trig_normal(&p.mul_exps(&factor)))
        .collect()
}

fn coordinates(polys: &[Poly]) -> (Vec<Monomial>, Vec<Vec<Q>>) {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in polys {
        for (m, _) in p.terms() {
            let k = index.len();
            index.entry(m.clone()).or_insert(k);
        }
    }
    let mut monos: Vec<Monomial> = vec![Monomial::one(); index.len()];
    for (m, k) in &index {
        monos[*k] = m.clone();
    }
    let vecs = polys
        .iter()
        .map(|p| {
            let mut v = vec![Q::zero(); index.len()];
            for (m, c) in p.terms() {
                v[index[m]] = c.clone();
            }
            v
        })
        .collect();
    (monos, vecs)
}

fn field_env(n: usize, rng: &mut impl Rng) -> Env {
    let mut e = Env::new()
        .with(Var::T, rng.gen_range(-1.5..1.5))
        .with(Var::U, rng.gen_range(-1.2..1.2));
    for a in 1..=n {
        e.set(Var::X(a as u8), rng.gen_range(-1.5..1.5));
    }
    e
}

fn eval_field(v: &VectorField, env: &Env) -> Option<Vec<f64>> {
    v.components()
        .iter()
        .map(|c| eval(c, env, &OpaqueTable::new()).ok())
        .collect()
}

/// Least squares over sampled points, rationalized and re-verified.
fn numeric_coefficients(basis: &[VectorField], target: &VectorField, seed: u64) -> Option<Vec<Q>> {
    let m = basis.len();
    let n = target.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut attempts = 0;
    while rows.len() < 3 * m * (n + 2) && attempts < 40 * m {
        attempts += 1;
        let env = field_env(n, &mut rng);
        let Some(b) = eval_field(target, &env) else { continue };
        let cols: Option<Vec<Vec<f64>>> = basis.iter().map(|v| eval_field(v, &env)).collect();
        let Some(cols) = cols else { continue };
        for (comp, bv) in b.iter().enumerate() {
            rows.push(cols.iter().map(|c| c[comp]).collect());
            rhs.push(*bv);
        }
    }
    if rows.is_empty() {
        return None;
    }
    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    let coeffs: Option<Vec<Q>> = sol.iter().map(|x| rationalize(*x, 1000, 1e-7)).collect();
    let coeffs = coeffs?;
    let mut combo = VectorField::zero(n);
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            combo = combo.add(&basis[k].scale(&Poly::constant(c.clone())));
        }
    }
    let diff = combo.sub(target);
    if diff.components().iter().all(|c| symbolic_zero(c)) {
        Some(coeffs)
    } else {
        None
    }
}

/// Expresses every bracket `[Q_i, Q_j]` in the basis. Coefficients are
/// compared after bringing basis fields and brackets to one normal form;
/// brackets that do not resolve exactly are retried by least squares at
/// random points and accepted only if the rationalized combination
/// verifies symbolically.
pub fn structure_constants(basis: &[VectorField]) -> Result<StructureConstants> {
    let m = basis.len();
    if m == 0 {
        return Err(Error::Config("empty basis".into()));
    }
    let n = basis[0].n;
    for v in basis {
        if v.n != n {
            return Err(Error::DimensionMismatch(n, v.n));
        }
    }
    let mut brackets: Vec<(usize, usize, VectorField)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            brackets.push((i, j, lie_bracket(&basis[i], &basis[j])?));
        }
    }
    let mut polys: Vec<Poly> = basis.iter().map(VectorField::as_marked_poly).collect();
    polys.extend(brackets.iter().map(|(_, _, b)| b.as_marked_poly()));
    let forms = common_forms(&polys);
    let (_, vecs) = coordinates(&forms);
    let rows = vecs.first().map_or(0, |v| v.len());
    // columns are basis fields
    let a: Vec<Vec<Q>> = (0..rows)
        .map(|r| (0..m).map(|k| vecs[k][r].clone()).collect())
        .collect();
    if linalg::rank(&a) < m {
        return Err(Error::DependentBasis);
    }
    let mut c = vec![vec![vec![Q::zero(); m]; m]; m];
    let mut numeric_fallback = false;
    for (bi, (i, j, br)) in brackets.iter().enumerate() {
        let target = &vecs[m + bi];
        let sol = match linalg::solve(&a, target) {
            Some(s) => s,
            None => {
                numeric_fallback = true;
                numeric_coefficients(basis, br, 17 + bi as u64).ok_or_else(|| {
                    Error::NotClosed(format!("[{}, {}] = {} is outside the span", basis[*i], basis[*j], br))
                })?
            }
        };
        for k in 0..m {
            c[*i][*j][k] = sol[k].clone();
            c[*j][*i][k] = -sol[k].clone();
        }
    }
    Ok(StructureConstants { c, numeric_fallback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational::q;

    #[test]
    fn small_algebras() {
        let dt = VectorField::dt(2);
        let mut tdt = VectorField::zero(2);
        tdt.xi0 = Poly::var(Var::T);
        let sc = structure_constants(&[dt.clone(), tdt]).unwrap();
        assert_eq!(sc.c[0][1], vec![q(1), q(0)]);
        let mut t2 = VectorField::zero(2);
        t2.xi0 = Poly::var(Var::T).powi(2);
        assert!(matches!(structure_constants(&[dt.clone(), t2]), Err(Error::NotClosed(_))));
        assert_eq!(structure_constants(&[dt.clone(), dt]), Err(Error::DependentBasis));
    }
}
