use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{diff, Poly, Var};
use crate::syntax::parser::marker_param;

/// `xi0 @t + xi[a] @x(a+1) + eta @u` with coefficients in (t, x, u).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub n: usize,
    pub xi0: Poly,
    pub xi: Vec<Poly>,
    pub eta: Poly,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_vector_field(self))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_vector_field(self))
    }
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField {
            n,
            xi0: Poly::zero(),
            xi: vec![Poly::zero(); n],
            eta: Poly::zero(),
        }
    }

    pub fn new(n: usize, xi0: Poly, xi: Vec<Poly>, eta: Poly) -> Self {
        assert_eq!(xi.len(), n, "spatial component count must equal n");
        VectorField { n, xi0, xi, eta }
    }

    pub fn dt(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.xi0 = Poly::one();
        v
    }

    pub fn du(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.eta = Poly::one();
        v
    }

    /// `@x(a)`, 1-based.
    pub fn dx(n: usize, a: usize) -> Self {
        let mut v = Self::zero(n);
        v.xi[a - 1] = Poly::one();
        v
    }

    /// `x_a @x_b - x_b @x_a`, 1-based.
    pub fn rotation(n: usize, a: usize, b: usize) -> Self {
        let mut v = Self::zero(n);
        v.xi[b - 1] = Poly::var(Var::X(a as u8));
        v.xi[a - 1] = Poly::var(Var::X(b as u8)).neg();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.xi0.is_zero() && self.eta.is_zero() && self.xi.iter().all(Poly::is_zero)
    }

    /// Components in the order t, x1..xn, u.
    pub fn components(&self) -> Vec<&Poly> {
        let mut c = vec![&self.xi0];
        c.extend(self.xi.iter());
        c.push(&self.eta);
        c
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        VectorField {
            n: self.n,
            xi0: f(&self.xi0),
            xi: self.xi.iter().map(&f).collect(),
            eta: f(&self.eta),
        }
    }

    pub fn scale(&self, k: &Poly) -> Self {
        self.map(|p| p.mul(k))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        VectorField {
            n: self.n,
            xi0: self.xi0.add(&o.xi0),
            xi: self.xi.iter().zip(&o.xi).map(|(a, b)| a.add(b)).collect(),
            eta: self.eta.add(&o.eta),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Poly::int(-1)))
    }

    /// Action on a function of (t, x, u).
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = self.xi0.mul(&diff(f, Var::T)).add(&self.eta.mul(&diff(f, Var::U)));
        for (a, xa) in self.xi.iter().enumerate() {
            if !xa.is_zero() {
                out = out.add(&xa.mul(&diff(f, Var::X(a as u8 + 1))));
            }
        }
        out
    }

    /// `sum coeff * marker` as a single polynomial with marker parameters.
    pub fn as_marked_poly(&self) -> Poly {
        let mut out = self.xi0.mul(&marker_param("t"));
        for (a, xa) in self.xi.iter().enumerate() {
            out = out.add(&xa.mul(&marker_param(&format!("x{}", a + 1))));
        }
        out.add(&self.eta.mul(&marker_param("u")))
    }

    /// Rejects coefficients that involve derivative variables.
    pub fn validate(&self) -> Result<()> {
        for c in self.components() {
            let bad = c.depends_on(Var::Ut) || (1..=9).any(|k| c.depends_on(Var::Ux(k)));
            if bad {
                return Err(Error::IllegalDependence(format!("vector field coefficient {c}")));
            }
        }
        Ok(())
    }
}

/// `[q1, q2]` computed coefficientwise as `q1(c2) - q2(c1)`.
pub fn lie_bracket(q1: &VectorField, q2: &VectorField) -> Result<VectorField> {
    if q1.n != q2.n {
        return Err(Error::DimensionMismatch(q1.n, q2.n));
    }
    let comp = |c1: &Poly, c2: &Poly| q1.apply(c2).sub(&q2.apply(c1));
    Ok(VectorField {
        n: q1.n,
        xi0: comp(&q1.xi0, &q2.xi0),
        xi: q1.xi.iter().zip(&q2.xi).map(|(a, b)| comp(a, b)).collect(),
        eta: comp(&q1.eta, &q2.eta),
    })
}
