use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::expr::rational::Q;
use crate::expr::zero::{int_exponent, is_zero};
use crate::expr::{diff, Atom, Poly, Var, Verdict};

/// Coefficients of `(A ut^2 + B ut + C) F_ut = (2 A ut + D) F`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFit {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl RationalFit {
    pub fn residual(&self, f: &Poly) -> Poly {
        let ut = Poly::var(Var::Ut);
        let lhs = self.a.mul(&ut.powi(2)).add(&self.b.mul(&ut)).add(&self.c);
        let rhs = self.a.mul(&ut).scale(&Q::from_integer(2.into())).add(&self.d);
        lhs.mul(&diff(f, Var::Ut)).sub(&rhs.mul(f))
    }
}

fn depends_on_ut(a: &Atom) -> bool {
    Poly::from_atom(a.clone()).depends_on(Var::Ut)
}

/// Splits `r` as `num / den` with both polynomial in `ut`, by collecting
/// the negative integer powers of `ut` and of `ut`-dependent roots.
fn clear_ut_denominators(r: &Poly) -> Option<(Vec<Poly>, Vec<Poly>)> {
    let mut factor: BTreeMap<Atom, Q> = BTreeMap::new();
    for (m, _) in r.terms() {
        for (a, e) in &m.0 {
            if e.is_negative() && depends_on_ut(a) && matches!(a, Atom::Var(_) | Atom::Root(_)) {
                int_exponent(e)?;
                let slot = factor.entry(a.clone()).or_insert_with(|| Q::from_integer(0.into()));
                if -e > *slot {
                    *slot = -e;
                }
            }
        }
    }
    let num = r.mul_exps(&factor);
    let mut den = Poly::one();
    for (a, e) in &factor {
        let base = match a {
            Atom::Root(b) => (**b).clone(),
            other => Poly::from_atom(other.clone()),
        };
        den = den.mul(&base.powi(int_exponent(e)?));
    }
    Some((num.coefficients_in(Var::Ut)?, den.coefficients_in(Var::Ut)?))
}

fn entry_zero(p: &Poly) -> bool {
    p.is_zero() || !matches!(is_zero(p), Verdict::NonZero(_))
}

/// One null vector of a small symbolic matrix, by fraction-free
/// elimination.
fn null_vector(mut m: Vec<Vec<Poly>>, cols: usize) -> Option<Vec<Poly>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !entry_zero(&m[i][col])) else {
            continue;
        };
        m.swap(row, p);
        for i in 0..m.len() {
            if i == row || entry_zero(&m[i][col]) {
                continue;
            }
            let (piv, e) = (m[row][col].clone(), m[i][col].clone());
            for k in 0..cols {
                m[i][k] = piv.mul(&m[i][k]).sub(&e.mul(&m[row][k]));
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivots.iter().any(|(_, pc)| pc == c))?;
    let mut x = vec![Poly::zero(); cols];
    x[free] = Poly::one();
    for &(r, c) in pivots.iter().rev() {
        let mut s = Poly::zero();
        for k in 0..cols {
            if k != c {
                s = s.add(&m[r][k].mul(&x[k]));
            }
        }
        x[c] = s.neg().mul(&m[r][c].powi(-1));
    }
    Some(x)
}

/// Fits `F_ut / F` to `(2 A ut + D) / (A ut^2 + B ut + C)`.
pub fn rational_fit(f: &Poly) -> Result<RationalFit> {
    if f.depends_on(Var::T) {
        return Err(Error::IllegalDependence("the fit needs F = F(u, ut)".into()));
    }
    let r = diff(f, Var::Ut).mul(&f.powi(-1));
    let (num, den) = clear_ut_denominators(&r).ok_or(Error::NoFit)?;
    let get = |v: &Vec<Poly>, j: isize| -> Poly {
        if j < 0 {
            Poly::zero()
        } else {
            v.get(j as usize).cloned().unwrap_or_else(Poly::zero)
        }
    };
    let top = num.len().max(den.len()) + 2;
    let two = Q::from_integer(2.into());
    let mut rows = Vec::new();
    for j in 0..top as isize {
        rows.push(vec![
            get(&num, j - 2).sub(&get(&den, j - 1).scale(&two)),
            get(&num, j - 1),
            get(&num, j),
            get(&den, j).neg(),
        ]);
    }
    let x = null_vector(rows, 4).ok_or(Error::NoFit)?;
    let lead = x[..3]
        .iter()
        .chain(std::iter::once(&x[3]))
        .find(|p| !entry_zero(p))
        .cloned()
        .ok_or(Error::NoFit)?;
    let inv = lead.powi(-1);
    let norm: Vec<Poly> = x.iter().map(|p| if entry_zero(p) { Poly::zero() } else { p.mul(&inv) }).collect();
    let fit = RationalFit {
        a: norm[0].clone(),
        b: norm[1].clone(),
        c: norm[2].clone(),
        d: norm[3].clone(),
    };
    if is_zero(&fit.residual(f)).is_zero() {
        Ok(fit)
    } else {
        Err(Error::NoFit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational::q;

    fn ut() -> Poly {
        Poly::var(Var::Ut)
    }

    #[test]
    fn fixtures() {
        let ints = |v: [i64; 4]| RationalFit {
            a: Poly::int(v[0]),
            b: Poly::int(v[1]),
            c: Poly::int(v[2]),
            d: Poly::int(v[3]),
        };
        assert_eq!(rational_fit(&ut().exp()).unwrap(), ints([0, 0, 1, 1]));
        assert_eq!(rational_fit(&ut().powi(3)).unwrap(), ints([0, 1, 0, 3]));
        let exp_inv = ut().powi(2).mul(&ut().powi(-1).exp());
        assert_eq!(rational_fit(&exp_inv).unwrap(), ints([1, 0, 0, -1]));
        let beta = ut().pow_q(&(q(5) / q(2)));
        let fit = rational_fit(&beta).unwrap();
        assert_eq!(fit.d, Poly::constant(q(5) / q(2)));
    }

    #[test]
    fn no_fit() {
        let f = ut().powi(2).exp();
        assert_eq!(rational_fit(&f), Err(Error::NoFit));
    }
}
