//! Exact rational weights and their text encoding.
//!
//! Literals are decimal integers, `p/q` rationals, or exponent-coded
//! `2^e`, `2^e*k` (e may be negative). Each side of a `/` may use any
//! integer form.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for every weight, latency and cost.
pub type Weight = BigRational;

/// Integer weight.
pub fn int(v: i64) -> Weight {
    BigRational::from_integer(BigInt::from(v))
}

/// `p/q` as a weight. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Weight {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact `2^e` for any signed exponent.
pub fn pow2(e: i64) -> Weight {
    let one = BigInt::one();
    if e >= 0 {
        BigRational::from_integer(one << (e as usize))
    } else {
        BigRational::new(one.clone(), one << ((-e) as usize))
    }
}

/// `base^e` for a signed exponent and nonzero base.
pub fn powi(base: &Weight, e: i64) -> Weight {
    let mut acc = Weight::one();
    let mut b = if e >= 0 { base.clone() } else { base.recip() };
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        k >>= 1;
    }
    acc
}

/// Ceiling of a nonnegative rational as an integer.
pub fn ceil_int(w: &Weight) -> BigInt {
    w.ceil().to_integer()
}

/// Checks `w > 0`.
pub fn ensure_positive(w: &Weight, what: &str) -> Result<()> {
    if w.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!("{what} must be positive, got {}", format_weight(w))))
    }
}

fn parse_int_literal(s: &str) -> std::result::Result<Weight, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("2^") {
        let (e, k) = match rest.split_once('*') {
            Some((e, k)) => (e, Some(k)),
            None => (rest, None),
        };
        let e: i64 = e.trim().parse().map_err(|_| format!("bad exponent `{e}`"))?;
        if e.unsigned_abs() > 1 << 26 {
            return Err(format!("exponent {e} out of range"));
        }
        let mut w = pow2(e);
        if let Some(k) = k {
            let k: BigInt = k.trim().parse().map_err(|_| format!("bad multiplier `{k}`"))?;
            w *= BigRational::from_integer(k);
        }
        Ok(w)
    } else {
        let v: BigInt = s.parse().map_err(|_| format!("bad number `{s}`"))?;
        Ok(BigRational::from_integer(v))
    }
}

/// Parses a weight literal.
pub fn parse_weight(s: &str) -> std::result::Result<Weight, String> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_int_literal(p)?;
            let q = parse_int_literal(q)?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(p / q)
        }
        None => parse_int_literal(s),
    }
}

fn format_int(v: &BigInt) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let tz = v.trailing_zeros().unwrap_or(0);
    if tz >= 64 {
        let k: BigInt = v >> (tz as usize);
        if k.is_one() {
            format!("2^{tz}")
        } else {
            format!("2^{tz}*{k}")
        }
    } else {
        v.to_string()
    }
}

/// Canonical text form; `parse_weight(format_weight(w)) == w`.
pub fn format_weight(w: &Weight) -> String {
    let p = w.numer();
    let q = w.denom();
    if q.is_one() {
        format_int(p)
    } else {
        format!("{}/{}", format_int(p), format_int(q))
    }
}

/// Approximate base-2 logarithm, for reporting only.
pub fn log2_approx(w: &Weight) -> f64 {
    fn lg(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 60 {
            v.to_f64().unwrap_or(0.0).log2()
        } else {
            let shift = bits - 53;
            let top = (v >> (shift as usize)).to_f64().unwrap_or(1.0);
            top.log2() + shift as f64
        }
    }
    if w.is_zero() {
        return f64::NEG_INFINITY;
    }
    lg(&w.numer().abs()) - lg(w.denom())
}

/// Exact `⌊log_base w⌋` for `w > 0`, `base > 1`, by exponential then binary search.
pub fn floor_log(base: &Weight, w: &Weight) -> i64 {
    debug_assert!(base > &Weight::one() && w.is_positive());
    let one = Weight::one();
    // bracket [lo, hi) with base^lo <= w < base^hi
    let (mut lo, mut hi) = if w >= &one {
        let mut hi = 1i64;
        while &powi(base, hi) <= w {
            hi *= 2;
        }
        (hi / 2, hi)
    } else {
        let mut lo = -1i64;
        while &powi(base, lo) > w {
            lo *= 2;
        }
        (lo, lo / 2)
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if &powi(base, mid) <= w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Sign of a weight as -1, 0, 1.
pub fn sign(w: &Weight) -> i8 {
    match w.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// True when `w` is an integer.
pub fn is_integral(w: &Weight) -> bool {
    w.denom().is_one()
}
