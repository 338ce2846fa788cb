//! Exact rational helpers on top of `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => x.to_f64().unwrap_or(f64::NAN),
    }
}

/// Integer power with a signed exponent. Panics on `0^negative`.
pub fn pow_int(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        assert!(!base.is_zero(), "zero to a negative power");
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Splits `e` into `floor(e)` and the fractional part in `[0, 1)`.
pub fn floor_frac(e: &Q) -> (i64, Q) {
    let fl = e.floor();
    let k = fl.to_integer().to_i64().expect("exponent out of range");
    (k, e - fl)
}

/// Exact `k`-th root of a non-negative integer, if it exists.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// `base^exp` when the result is rational (base > 0 or integral exponent).
pub fn try_rational_pow(base: &Q, exp: &Q) -> Option<Q> {
    if is_integer(exp) {
        if base.is_zero() && exp.is_negative() {
            return None;
        }
        return Some(pow_int(base, exp.to_integer().to_i64()?));
    }
    if base.is_negative() {
        return None;
    }
    let k: u32 = exp.denom().to_u32()?;
    let n = exact_root(base.numer(), k)?;
    let d = exact_root(base.denom(), k)?;
    let root = Q::new(n, d);
    Some(pow_int(&root, exp.numer().to_i64()?))
}

/// Best rational approximation with denominator at most `max_den`,
/// accepted only if it matches `x` within `tol`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    for _ in 0..40 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - x.abs()).abs() <= tol * x.abs().max(1.0) {
            return Some(Q::new(
                BigInt::from(sign as i128 * h1),
                BigInt::from(k1),
            ));
        }
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}

pub fn gcd_q(a: &Q, b: &Q) -> Q {
    // gcd of numerators over lcm of denominators
    Q::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

pub fn fmt_q(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn sign_of(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
