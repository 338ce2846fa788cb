//! Canonical representation: a finite sum of rational multiples of
//! monomials, where a monomial is a product of atoms raised to rational
//! exponents. Every constructor keeps the value canonical, so structural
//! equality of two `Poly` values is the light-weight equality test.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{floor_frac, gcd_q, is_integer, pow_int, q, try_rational_pow, Q};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    T,
    U,
    Ut,
    /// Spatial coordinate `x_a`, 1-based.
    X(u8),
    /// First derivative `u_a`, 1-based.
    Ux(u8),
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::T => "t".into(),
            Var::U => "u".into(),
            Var::Ut => "ut".into(),
            Var::X(a) => format!("x{a}"),
            Var::Ux(a) => format!("ux{a}"),
        }
    }
}

/// Known sign of a named parameter; used by the numeric probes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub enum Sign {
    #[default]
    Any,
    Positive,
    Negative,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Param {
    pub name: Arc<str>,
    pub sign: Sign,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Atan,
    Abs,
    Sign,
    /// Surface form only; builds a half power.
    Sqrt,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan => "atan",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "atan" => Func::Atan,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Application of an uninterpreted function with formal partial derivatives
/// `derivs[i]` taken with respect to argument slot `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Opaque {
    pub name: Arc<str>,
    pub args: Vec<Poly>,
    pub derivs: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    /// Prime base; its exponent is kept in `(0, 1)`.
    Surd(Q),
    Param(Param),
    Var(Var),
    Func(Func, Arc<Poly>),
    Opaque(Arc<Opaque>),
    /// `base^expo` with `expo` a non-constant monomial of coefficient one.
    Pow(Arc<Poly>, Arc<Poly>),
    /// A normalized multi-term base (or a negative single term) carried with
    /// a non-integral or negative exponent.
    Root(Arc<Poly>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub BTreeMap<Atom, Q>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(a, q(1));
        Monomial(m)
    }

    pub fn exponent(&self, a: &Atom) -> Q {
        self.0.get(a).cloned().unwrap_or_else(Q::zero)
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        let mut m = self.0.clone();
        m.remove(a);
        Monomial(m)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_poly(self))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_poly(self))
    }
}

fn small_prime_factors(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= n {
        if p > limit {
            return None;
        }
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    Some(out)
}

/// Builds the canonical polynomial for `c * prod(atom^exp)`.
pub fn monomial_poly(c: Q, exps: BTreeMap<Atom, Q>) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    let mut coef = c;
    let mut keep: BTreeMap<Atom, Q> = BTreeMap::new();
    let mut expand: Vec<(Arc<Poly>, Q)> = Vec::new();
    let mut surds: Vec<(BigInt, Q)> = Vec::new();
    for (a, e) in exps {
        if e.is_zero() {
            continue;
        }
        match &a {
            Atom::Surd(b) => surds.push((b.numer().clone(), e)),
            Atom::Func(Func::Sign, _) if is_integer(&e) => {
                let k = e.to_integer().to_i64().unwrap_or(0);
                if k.rem_euclid(2) == 1 {
                    keep.insert(a, q(1));
                }
            }
            Atom::Func(Func::Abs, arg) if is_integer(&e) => {
                let k = e.to_integer().to_i64().unwrap_or(1);
                if k.rem_euclid(2) == 0 {
                    expand.push((arg.clone(), e));
                } else if k != 1 {
                    expand.push((arg.clone(), q(k - 1)));
                    keep.insert(a, q(1));
                } else {
                    keep.insert(a, e);
                }
            }
            Atom::Root(base) => {
                let (k, f) = floor_frac(&e);
                if k >= 1 {
                    expand.push((base.clone(), q(k)));
                    if !f.is_zero() {
                        keep.insert(a, f);
                    }
                } else {
                    keep.insert(a, e);
                }
            }
            _ => {
                keep.insert(a, e);
            }
        }
    }
    // merge surds by prime base, fold integral parts into the coefficient
    let mut by_prime: BTreeMap<BigInt, Q> = BTreeMap::new();
    for (b, e) in surds {
        match small_prime_factors(&b) {
            Some(fs) => {
                for (p, k) in fs {
                    *by_prime.entry(p).or_insert_with(Q::zero) += &e * q(k as i64);
                }
            }
            None => *by_prime.entry(b).or_insert_with(Q::zero) += e,
        }
    }
    for (p, e) in by_prime {
        let (k, f) = floor_frac(&e);
        coef *= pow_int(&Q::from_integer(p.clone()), k);
        if !f.is_zero() {
            keep.insert(Atom::Surd(Q::from_integer(p)), f);
        }
    }
    let mut out = Poly::zero();
    out.terms.insert(Monomial(keep), coef);
    for (base, k) in expand {
        out = out.mul(&base.pow_q(&k));
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(q(1))
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(q(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::from_atom(Atom::Var(v))
    }

    pub fn param(name: &str, sign: Sign) -> Self {
        Poly::from_atom(Atom::Param(Param {
            name: name.into(),
            sign,
        }))
    }

    pub fn from_atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(a, q(1));
        monomial_poly(q(1), m)
    }

    pub fn from_term(m: Monomial, c: Q) -> Self {
        monomial_poly(c, m.0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Returns the atom if `self` is exactly one atom to the first power.
    pub fn as_atom(&self) -> Option<&Atom> {
        let (m, c) = self.single_term()?;
        if !c.is_one() || m.0.len() != 1 {
            return None;
        }
        let (a, e) = m.0.iter().next().unwrap();
        if e.is_one() {
            Some(a)
        } else {
            None
        }
    }

    pub fn as_var(&self) -> Option<Var> {
        match self.as_atom()? {
            Atom::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub(crate) fn insert_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&q(-1))
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * k))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut merged = m1.0.clone();
                let mut simple = true;
                for (a, e) in &m2.0 {
                    let slot = merged.entry(a.clone()).or_insert_with(Q::zero);
                    *slot += e;
                    if needs_fix(a, slot) {
                        simple = false;
                    }
                }
                let c = c1 * c2;
                if simple {
                    merged.retain(|_, e| !e.is_zero());
                    out.insert_term(Monomial(merged), c);
                } else {
                    let p = monomial_poly(c, merged);
                    for (m, c) in p.terms {
                        out.insert_term(m, c);
                    }
                }
            }
        }
        out
    }

    /// Multiplies every term by the given atom powers before the rewrite
    /// rules run, so that a root factor can cancel a reciprocal root.
    pub fn mul_exps(&self, exps: &BTreeMap<Atom, Q>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut merged = m.0.clone();
            for (a, e) in exps {
                *merged.entry(a.clone()).or_insert_with(Q::zero) += e;
            }
            for (m, c) in monomial_poly(c.clone(), merged).terms {
                out.insert_term(m, c);
            }
        }
        out
    }

    pub fn div(&self, other: &Poly) -> Poly {
        self.mul(&other.pow_q(&q(-1)))
    }

    pub fn powi(&self, k: i64) -> Poly {
        self.pow_q(&q(k))
    }

    pub fn pow_q(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::one();
        }
        if k.is_one() {
            return self.clone();
        }
        if self.is_zero() {
            if k.is_positive() {
                return Poly::zero();
            }
            // undefined; evaluation reports a domain error
            return monomial_poly(q(1), [(Atom::Root(Arc::new(Poly::zero())), k.clone())].into());
        }
        if let Some((m, c)) = self.single_term() {
            let mut exps: BTreeMap<Atom, Q> =
                m.0.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            if let Some(r) = try_rational_pow(c, k) {
                return monomial_poly(r, exps);
            }
            if c.is_positive() {
                if !c.numer().is_one() {
                    merge_exp(&mut exps, Atom::Surd(Q::from_integer(c.numer().clone())), k.clone());
                }
                if !c.denom().is_one() {
                    merge_exp(&mut exps, Atom::Surd(Q::from_integer(c.denom().clone())), -k.clone());
                }
                return monomial_poly(q(1), exps);
            }
            return monomial_poly(q(1), [(Atom::Root(Arc::new(self.clone())), k.clone())].into());
        }
        if is_integer(k) && k.is_positive() {
            let mut n = k.to_integer().to_u64().expect("exponent too large");
            let mut base = self.clone();
            let mut acc = Poly::one();
            while n > 0 {
                if n & 1 == 1 {
                    acc = acc.mul(&base);
                }
                n >>= 1;
                if n > 0 {
                    base = base.mul(&base);
                }
            }
            return acc;
        }
        let (content, gcd, base) = self.primitive_split(is_integer(k));
        let mut out = Poly::constant(content).pow_q(k);
        out = out.mul(&Poly::from_term(gcd, q(1)).pow_q(k));
        out.mul(&monomial_poly(q(1), [(Atom::Root(Arc::new(base)), k.clone())].into()))
    }

    /// Splits a multi-term polynomial as `content * gcd_monomial * base`.
    /// With `sign_normalize`, the first term of `base` has a positive
    /// coefficient; otherwise the content is kept positive.
    pub fn primitive_split(&self, sign_normalize: bool) -> (Q, Monomial, Poly) {
        let mut mins: BTreeMap<Atom, Q> = BTreeMap::new();
        let mut first = true;
        for m in self.terms.keys() {
            if first {
                mins = m.0.clone();
                first = false;
                continue;
            }
            let keys: Vec<Atom> = mins.keys().cloned().collect();
            for a in keys {
                let e = m.exponent(&a);
                let cur = mins[&a].clone();
                let v = if e < cur { e } else { cur };
                mins.insert(a, v);
            }
            for (a, e) in &m.0 {
                if !mins.contains_key(a) && e.is_negative() {
                    mins.insert(a.clone(), e.clone());
                }
            }
        }
        // atoms missing from some term have implicit exponent zero
        for (a, e) in mins.iter_mut() {
            let missing = self.terms.keys().any(|m| !m.0.contains_key(a));
            if missing && e.is_positive() {
                *e = Q::zero();
            }
        }
        mins.retain(|_, e| !e.is_zero());
        let mut content: Option<Q> = None;
        for c in self.terms.values() {
            content = Some(match content {
                None => c.abs(),
                Some(g) => gcd_q(&g, c),
            });
        }
        let mut content = content.unwrap_or_else(|| q(1));
        if sign_normalize {
            if let Some(c) = self.terms.values().next() {
                if c.is_negative() {
                    content = -content;
                }
            }
        }
        let mut base = Poly::zero();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            for (a, me) in &mins {
                let slot = e.entry(a.clone()).or_insert_with(Q::zero);
                *slot -= me;
            }
            e.retain(|_, x| !x.is_zero());
            if e.iter().any(|(a, x)| needs_fix(a, x)) {
                for (m, c) in monomial_poly(c / &content, e).terms {
                    base.insert_term(m, c);
                }
            } else {
                base.insert_term(Monomial(e), c / &content);
            }
        }
        (content, Monomial(mins), base)
    }

    pub fn pow_poly(&self, e: &Poly) -> Poly {
        if let Some(k) = e.as_constant() {
            return self.pow_q(&k);
        }
        if let Some((m, c)) = self.single_term() {
            if c.is_positive() {
                let mut out = if c.is_one() {
                    Poly::one()
                } else {
                    pow_sym_atom_free(&Poly::constant(c.clone()), e)
                };
                for (a, j) in &m.0 {
                    let ex = e.scale(j);
                    out = out.mul(&atom_pow_sym(a, &ex));
                }
                return out;
            }
        }
        pow_sym_atom_free(self, e)
    }

    pub fn exp(&self) -> Poly {
        let mut out = Poly::one();
        for (m, c) in &self.terms {
            if m.is_one() {
                out = out.mul(&monomial_poly(
                    q(1),
                    [(Atom::Func(Func::Exp, Arc::new(Poly::one())), c.clone())].into(),
                ));
                continue;
            }
            let lns: Vec<(&Atom, &Q)> = m
                .0
                .iter()
                .filter(|(a, e)| matches!(a, Atom::Func(Func::Ln, _)) && e.is_one())
                .collect();
            if lns.len() == 1 {
                let (ln_atom, _) = lns[0];
                if let Atom::Func(_, y) = ln_atom {
                    let rest = Poly::from_term(m.without(ln_atom), c.clone());
                    out = out.mul(&y.pow_poly(&rest));
                    continue;
                }
            }
            out = out.mul(&monomial_poly(
                q(1),
                [(
                    Atom::Func(Func::Exp, Arc::new(Poly::from_term(m.clone(), q(1)))),
                    c.clone(),
                )]
                .into(),
            ));
        }
        out
    }

    pub fn ln(&self) -> Poly {
        if let Some((m, c)) = self.single_term() {
            if c.is_positive() {
                let mut out = if c.is_one() {
                    Poly::zero()
                } else {
                    Poly::from_atom(Atom::Func(Func::Ln, Arc::new(Poly::constant(c.clone()))))
                };
                for (a, e) in &m.0 {
                    out = out.add(&ln_atom(a).scale(e));
                }
                return out;
            }
        }
        Poly::from_atom(Atom::Func(Func::Ln, Arc::new(self.clone())))
    }

    pub fn apply(&self, f: Func) -> Poly {
        match f {
            Func::Exp => return self.exp(),
            Func::Ln => return self.ln(),
            Func::Sqrt => return self.pow_q(&super::rational::qr(1, 2)),
            _ => {}
        }
        if self.leading_negative() {
            let m = self.neg();
            match f {
                Func::Cos | Func::Cosh | Func::Abs => return m.apply(f),
                Func::Sin | Func::Tan | Func::Sinh | Func::Tanh | Func::Atan | Func::Sign => {
                    return m.apply(f).neg()
                }
                _ => {}
            }
        }
        if self.is_zero() {
            return match f {
                Func::Cos | Func::Cosh => Poly::one(),
                _ => Poly::zero(),
            };
        }
        match f {
            Func::Abs | Func::Sign => {
                if let Some(c) = self.as_constant() {
                    return match f {
                        Func::Abs => Poly::constant(c.abs()),
                        _ => Poly::int(if c.is_positive() { 1 } else { -1 }),
                    };
                }
                if let Some((m, c)) = self.single_term() {
                    let mut out = Poly::constant(match f {
                        Func::Abs => c.abs(),
                        _ => q(if c.is_positive() { 1 } else { -1 }),
                    });
                    let mut rest = BTreeMap::new();
                    for (a, e) in &m.0 {
                        if atom_is_positive(a) {
                            if f == Func::Abs {
                                out = out.mul(&monomial_poly(q(1), [(a.clone(), e.clone())].into()));
                            }
                        } else {
                            rest.insert(a.clone(), e.clone());
                        }
                    }
                    if !rest.is_empty() {
                        out = out.mul(&Poly::from_atom(Atom::Func(
                            f,
                            Arc::new(monomial_poly(q(1), rest)),
                        )));
                    }
                    return out;
                }
                Poly::from_atom(Atom::Func(f, Arc::new(self.clone())))
            }
            _ => Poly::from_atom(Atom::Func(f, Arc::new(self.clone()))),
        }
    }

    pub fn leading_negative(&self) -> bool {
        self.terms.values().next().map_or(false, |c| c.is_negative())
    }

    /// Recursively collects atoms.
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for m in self.terms.keys() {
            for a in m.0.keys() {
                f(a);
                match a {
                    Atom::Func(_, p) | Atom::Root(p) => p.visit_atoms(f),
                    Atom::Pow(b, e) => {
                        b.visit_atoms(f);
                        e.visit_atoms(f);
                    }
                    Atom::Opaque(o) => o.args.iter().for_each(|p| p.visit_atoms(f)),
                    _ => {}
                }
            }
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if *a == Atom::Var(v) {
                found = true;
            }
        });
        found
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<Var> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Var(v) = a {
                out.insert(*v);
            }
        });
        out
    }

    pub fn params(&self) -> std::collections::BTreeSet<Param> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Param(p) = a {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn opaque_names(&self) -> std::collections::BTreeSet<Arc<str>> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Opaque(o) = a {
                out.insert(o.name.clone());
            }
        });
        out
    }

    /// The polynomial as a function of a single variable `v`, if its
    /// exponents in `v` are non-negative integers and no other atom
    /// depends on `v`: returns coefficients by degree.
    pub fn coefficients_in(&self, v: Var) -> Option<Vec<Poly>> {
        let atom = Atom::Var(v);
        let mut out: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(&atom);
            if !is_integer(&e) || e.is_negative() {
                return None;
            }
            let rest = m.without(&atom);
            for a in rest.0.keys() {
                if Poly::from_atom(a.clone()).depends_on(v) {
                    return None;
                }
            }
            let k = e.to_integer().to_usize()?;
            if out.len() <= k {
                out.resize(k + 1, Poly::zero());
            }
            out[k].insert_term(rest, c.clone());
        }
        Some(out)
    }
}

fn needs_fix(a: &Atom, e: &Q) -> bool {
    match a {
        Atom::Surd(_) => !(e.is_positive() && e < &q(1)),
        Atom::Func(Func::Sign, _) | Atom::Func(Func::Abs, _) => is_integer(e),
        Atom::Root(_) => e >= &q(1),
        _ => false,
    }
}

fn merge_exp(exps: &mut BTreeMap<Atom, Q>, a: Atom, e: Q) {
    *exps.entry(a).or_insert_with(Q::zero) += e;
}

fn atom_is_positive(a: &Atom) -> bool {
    match a {
        Atom::Func(Func::Exp, _) | Atom::Func(Func::Abs, _) | Atom::Surd(_) => true,
        Atom::Param(p) => p.sign == Sign::Positive,
        _ => false,
    }
}

fn ln_atom(a: &Atom) -> Poly {
    match a {
        Atom::Func(Func::Exp, y) => (**y).clone(),
        Atom::Pow(b, m) => m.mul(&b.ln()),
        Atom::Root(b) => Poly::from_atom(Atom::Func(Func::Ln, b.clone())),
        Atom::Surd(p) => Poly::from_atom(Atom::Func(Func::Ln, Arc::new(Poly::constant(p.clone())))),
        other => Poly::from_atom(Atom::Func(Func::Ln, Arc::new(Poly::from_atom(other.clone())))),
    }
}

/// `a^e` for an atom and a symbolic exponent.
fn atom_pow_sym(a: &Atom, e: &Poly) -> Poly {
    match a {
        Atom::Func(Func::Exp, y) => y.mul(e).exp(),
        Atom::Pow(b, m) => b.pow_poly(&m.mul(e)),
        _ => pow_sym_atom_free(&Poly::from_atom(a.clone()), e),
    }
}

/// `base^e` split into a rational power and `Pow` atoms per exponent term.
fn pow_sym_atom_free(base: &Poly, e: &Poly) -> Poly {
    let mut out = Poly::one();
    let b = Arc::new(base.clone());
    for (m, c) in e.terms() {
        if m.is_one() {
            out = out.mul(&base.pow_q(c));
        } else {
            out = out.mul(&monomial_poly(
                q(1),
                [(
                    Atom::Pow(b.clone(), Arc::new(Poly::from_term(m.clone(), q(1)))),
                    c.clone(),
                )]
                .into(),
            ));
        }
    }
    out
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Poly {
        Poly::int(n)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Poly {
        Poly::var(v)
    }
}
