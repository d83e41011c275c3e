//! Sparse sums of signed powers of two, `Σ c·2^e`.
//!
//! Compiled circuit instances use weights between `2^0` and `2^{1500N}`;
//! storing them as big integers would cost gigabytes, so they are kept as
//! short term lists and compared exactly without expansion.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::weight::Weight;

/// Non-adjacent-form digits, each packed as `exp << 1 | (coeff < 0)`, ascending.
/// Short sums are stored inline; compiled instances hold tens of millions.
#[derive(Clone)]
enum Digits {
    Inline(u8, [i32; INLINE]),
    Heap(Box<[i32]>),
}

const INLINE: usize = 5;

fn pack(e: i64, c: i64) -> i32 {
    debug_assert!(c == 1 || c == -1);
    let e = i32::try_from(e).ok().filter(|e| e.unsigned_abs() < 1 << 30).expect("exponent out of range");
    e << 1 | (c < 0) as i32
}

fn unpack(d: i32) -> (i64, i64) {
    ((d >> 1) as i64, if d & 1 == 1 { -1 } else { 1 })
}

impl Digits {
    fn from_slice(d: &[i32]) -> Self {
        if d.len() <= INLINE {
            let mut a = [0; INLINE];
            a[..d.len()].copy_from_slice(d);
            Digits::Inline(d.len() as u8, a)
        } else {
            Digits::Heap(d.into())
        }
    }

    fn as_slice(&self) -> &[i32] {
        match self {
            Digits::Inline(n, a) => &a[..*n as usize],
            Digits::Heap(b) => b,
        }
    }
}

/// `Σ coeff·2^exp` in canonical non-adjacent form: every coefficient is ±1
/// and exponents differ by at least two. The form is unique, so equality
/// of digits is equality of values.
#[derive(Clone)]
pub struct Pow2Sum {
    digits: Digits,
}

impl Default for Pow2Sum {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for Pow2Sum {
    fn eq(&self, o: &Self) -> bool {
        self.digits.as_slice() == o.digits.as_slice()
    }
}

impl Eq for Pow2Sum {}

impl std::hash::Hash for Pow2Sum {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.digits.as_slice().hash(h)
    }
}

impl fmt::Debug for Pow2Sum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pow2Sum({self})")
    }
}

impl Pow2Sum {
    pub fn zero() -> Self {
        Self { digits: Digits::Inline(0, [0; INLINE]) }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Self::from_digits(&[pack(e, 1)])
    }

    /// `k·2^e`.
    pub fn term(k: i64, e: i64) -> Self {
        Self::from_terms(vec![(e, k)])
    }

    pub fn from_int(k: i64) -> Self {
        Self::term(k, 0)
    }

    fn from_digits(d: &[i32]) -> Self {
        Self { digits: Digits::from_slice(d) }
    }

    fn digits(&self) -> &[i32] {
        self.digits.as_slice()
    }

    /// Builds from arbitrary `(exp, coeff)` pairs; the result is in
    /// non-adjacent form, which is unique, so derived equality is value equality.
    pub fn from_terms(mut terms: Vec<(i64, i64)>) -> Self {
        if !terms.windows(2).all(|w| w[0].0 <= w[1].0) {
            terms.sort_unstable_by_key(|t| t.0);
        }
        let mut out = Vec::with_capacity(terms.len());
        let mut idx = 0;
        let mut c: i128 = 0;
        let mut e = 0i64;
        loop {
            if c == 0 {
                if idx == terms.len() {
                    break;
                }
                e = terms[idx].0;
            }
            while idx < terms.len() && terms[idx].0 == e {
                c += terms[idx].1 as i128;
                idx += 1;
            }
            if c & 1 != 0 {
                // the digit depends on the value mod 4, including input terms at e+1
                let mut next: i128 = 0;
                let mut k = idx;
                while k < terms.len() && terms[k].0 == e + 1 {
                    next += terms[k].1 as i128;
                    k += 1;
                }
                let d = 2 - (c + 2 * next).rem_euclid(4);
                out.push(pack(e, d as i64));
                c -= d;
            }
            c >>= 1;
            e += 1;
        }
        Self::from_digits(&out)
    }

    /// `(exp, coeff)` pairs, ascending by exponent, coefficients ±1.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, i64)> + ExactSizeIterator + '_ {
        self.digits().iter().map(|&d| unpack(d))
    }

    pub fn is_zero(&self) -> bool {
        self.digits().is_empty()
    }

    /// Multiplies by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        let d: Vec<i32> = self.terms().map(|(e, c)| pack(e + k, c)).collect();
        Self::from_digits(&d)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * k)).collect())
    }

    /// Exact sign: in non-adjacent form the top digit dominates the rest.
    pub fn signum(&self) -> i32 {
        self.digits().last().map_or(0, |&d| unpack(d).1 as i32)
    }

    /// Smallest exponent present.
    pub fn min_exp(&self) -> Option<i64> {
        self.digits().first().map(|&d| unpack(d).0)
    }

    /// `⌈log2 |x|⌉` for a positive value, evaluated exactly.
    pub fn ceil_log2(&self) -> i64 {
        assert!(self.signum() > 0, "ceil_log2 of a non-positive value");
        let top = unpack(*self.digits().last().unwrap()).0 + 64;
        let mut k = top;
        // smallest k with x <= 2^k
        while (&Pow2Sum::pow2(k - 1) - self).signum() >= 0 {
            k -= 1;
        }
        k
    }

    /// `⌊log2 x⌋` for a positive value.
    pub fn floor_log2(&self) -> i64 {
        let c = self.ceil_log2();
        if (&Pow2Sum::pow2(c) - self).is_zero() {
            c
        } else {
            c - 1
        }
    }

    /// Expands to an exact rational.
    pub fn to_weight(&self) -> Weight {
        let mut num = BigInt::zero();
        let min = self.min_exp().unwrap_or(0).min(0);
        for (e, c) in self.terms() {
            num += BigInt::from(c) << ((e - min) as usize);
        }
        Weight::new(num, BigInt::one() << ((-min) as usize))
    }

    /// Expands to an integer; `None` if a negative exponent survives.
    pub fn to_bigint(&self) -> Option<BigInt> {
        let w = self.to_weight();
        w.is_integer().then(|| w.to_integer())
    }

    /// Bit length of the expanded value, for size estimates.
    pub fn bits(&self) -> i64 {
        self.digits().last().map(|&d| unpack(d).0 + 1).unwrap_or(0)
    }
}

/// Compares two non-adjacent forms without materialising the difference.
/// A form whose top exponent is at most `e` has magnitude below `(4/3)·2^e`,
/// so once the running difference reaches `3·2^e` the rest cannot change its sign.
fn cmp_naf(x: &[i32], y: &[i32]) -> Ordering {
    let (mut i, mut j) = (x.len(), y.len());
    let mut acc: i64 = 0;
    let mut cur = i64::MAX;
    loop {
        let ex = if i > 0 { Some(unpack(x[i - 1]).0) } else { None };
        let ey = if j > 0 { Some(unpack(y[j - 1]).0) } else { None };
        let e = match (ex, ey) {
            (None, None) => return acc.cmp(&0),
            (a, b) => a.max(b).unwrap(),
        };
        if acc != 0 {
            let gap = cur - e;
            if gap >= 2 || acc.abs() << gap >= 3 {
                return acc.cmp(&0);
            }
            acc <<= gap;
        }
        if ex == Some(e) {
            acc += unpack(x[i - 1]).1;
            i -= 1;
        }
        if ey == Some(e) {
            acc -= unpack(y[j - 1]).1;
            j -= 1;
        }
        cur = e;
    }
}

fn merge(a: impl Iterator<Item = (i64, i64)>, b: impl Iterator<Item = (i64, i64)>) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(a.size_hint().0 + b.size_hint().0);
    let mut a = a.peekable();
    let mut b = b.peekable();
    loop {
        let t = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) if x.0 <= y.0 => a.next(),
            (Some(_), Some(_)) => b.next(),
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => return out,
        };
        out.push(t.unwrap());
    }
}

impl Add for &Pow2Sum {
    type Output = Pow2Sum;
    fn add(self, o: &Pow2Sum) -> Pow2Sum {
        Pow2Sum::from_terms(merge(self.terms(), o.terms()))
    }
}

impl Sub for &Pow2Sum {
    type Output = Pow2Sum;
    fn sub(self, o: &Pow2Sum) -> Pow2Sum {
        Pow2Sum::from_terms(merge(self.terms(), o.terms().map(|(e, c)| (e, -c))))
    }
}

impl Neg for &Pow2Sum {
    type Output = Pow2Sum;
    fn neg(self) -> Pow2Sum {
        let d: Vec<i32> = self.digits().iter().map(|&d| d ^ 1).collect();
        Pow2Sum::from_digits(&d)
    }
}

impl Mul for &Pow2Sum {
    type Output = Pow2Sum;
    fn mul(self, o: &Pow2Sum) -> Pow2Sum {
        let mut t = Vec::with_capacity(self.digits().len() * o.digits().len());
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                t.push((e1 + e2, c1 * c2));
            }
        }
        Pow2Sum::from_terms(t)
    }
}

impl PartialOrd for Pow2Sum {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Pow2Sum {
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_naf(self.digits(), o.digits())
    }
}

impl fmt::Display for Pow2Sum {
    /// Small integers plainly, otherwise signed `2^e` or `2^e*k` terms, highest first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if self.terms().all(|(e, _)| (0..48).contains(&e)) {
            let v: i64 = self.terms().map(|(e, c)| c << e).sum();
            return write!(f, "{v}");
        }
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            match (e, c.unsigned_abs()) {
                (0, k) => write!(f, "{sign}{k}")?,
                (e, 1) => write!(f, "{sign}2^{e}")?,
                (e, k) => write!(f, "{sign}2^{e}*{k}")?,
            }
        }
        Ok(())
    }
}

/// Sign of an exact rational, for symmetry with [`Pow2Sum::signum`].
pub fn weight_sign(w: &Weight) -> i32 {
    if w.is_positive() {
        1
    } else if w.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::int;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        let x = &Pow2Sum::pow2(10) - &Pow2Sum::from_int(50);
        assert_eq!(x.to_weight(), int(1024 - 50));
        assert_eq!(x.signum(), 1);
        assert_eq!((-&x).signum(), -1);
        assert_eq!(Pow2Sum::from_terms(vec![(3, 1), (2, 2)]), Pow2Sum::pow2(4));
        assert_eq!(x.ceil_log2(), 10);
        assert_eq!(x.floor_log2(), 9);
        assert_eq!(Pow2Sum::pow2(7).ceil_log2(), 7);
        assert_eq!(Pow2Sum::pow2(-3).to_weight(), Weight::new(1.into(), 8.into()));
    }

    #[test]
    fn far_apart_terms() {
        // 2^9000 - 2^100*(2^60) stays positive; 2^-500 - 2^-501*2 is zero
        let a = &Pow2Sum::pow2(9000) - &Pow2Sum::term(3, 8999);
        assert_eq!(a.signum(), -1);
        let b = &Pow2Sum::pow2(-500) - &Pow2Sum::term(2, -501);
        assert!(b.is_zero());
        let c = &(&Pow2Sum::pow2(5000) - &Pow2Sum::pow2(4999)) - &Pow2Sum::pow2(4999);
        assert_eq!(c.signum(), 0);
        let d = &Pow2Sum::pow2(5000) - &(&Pow2Sum::pow2(4999) + &Pow2Sum::term(-1, -3000)).scale(2);
        assert_eq!(d, Pow2Sum::pow2(-2999));
        assert_eq!((-&d).signum(), -1);
    }

    #[test]
    fn display() {
        let x = &Pow2Sum::pow2(700) + &Pow2Sum::term(-3, 600);
        assert_eq!(x.to_string(), "2^700-2^602+2^600");
        assert_eq!(Pow2Sum::from_int(3).to_string(), "3");
        assert_eq!(Pow2Sum::from_int(-1000).to_string(), "-1000");
        assert_eq!((&Pow2Sum::pow2(64) + &Pow2Sum::from_int(3)).to_string(), "2^64+2^2-1");
    }

    #[test]
    fn inline_and_heap_storage() {
        assert_eq!(std::mem::size_of::<Pow2Sum>(), 24);
        // six digits spill to the heap; removing one brings the value back inline
        let long = Pow2Sum::from_terms((0..6).map(|k| (3 * k, 1)).collect());
        assert_eq!(long.terms().len(), 6);
        let short = &long - &Pow2Sum::pow2(15);
        assert_eq!(short, Pow2Sum::from_terms((0..5).map(|k| (3 * k, 1)).collect()));
        assert_eq!(&short + &Pow2Sum::pow2(15), long);
        assert_eq!((-&long).signum(), -1);
        assert_eq!(Pow2Sum::pow2(-70000).shl(70000), Pow2Sum::from_int(1));
    }

    proptest! {
        #[test]
        fn sign_matches_expansion(ts in prop::collection::vec((-40i64..200, -1000i64..1000), 0..12)) {
            let s = Pow2Sum::from_terms(ts.clone());
            let mut w = int(0);
            for (e, c) in ts {
                w += int(c) * crate::weight::powi(&int(2), e);
            }
            prop_assert_eq!(s.to_weight(), w.clone());
            prop_assert_eq!(s.signum(), weight_sign(&w));
        }

        #[test]
        fn canonical_non_adjacent_form(ts in prop::collection::vec((-20i64..60, -9i64..9), 0..12)) {
            let s = Pow2Sum::from_terms(ts);
            let t: Vec<_> = s.terms().collect();
            for w in t.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 + 2);
            }
            prop_assert!(t.iter().all(|t| t.1 == 1 || t.1 == -1));
            let again = Pow2Sum::from_terms(t.iter().rev().copied().collect());
            prop_assert_eq!(&again, &s);
        }

        #[test]
        fn ordering_matches_expansion(a in prop::collection::vec((0i64..300, -50i64..50), 0..6),
                                      b in prop::collection::vec((0i64..300, -50i64..50), 0..6)) {
            let (x, y) = (Pow2Sum::from_terms(a), Pow2Sum::from_terms(b));
            prop_assert_eq!(x.cmp(&y), x.to_weight().cmp(&y.to_weight()));
            prop_assert_eq!((&x * &y).to_weight(), x.to_weight() * y.to_weight());
        }
    }
}
