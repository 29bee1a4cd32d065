//! The Pierce digit algorithm.
//!
//! `d_1(x) = floor(1/x)` and `T(x) = 1 - d_1(x) x`, with `d_1(0) = inf` and
//! `T(0) = 0`; the `n`-th digit is `d_1(T^(n-1)(x))`. Every `x` in `[0, 1]`
//! equals `1/d_1 - 1/(d_1 d_2) + 1/(d_1 d_2 d_3) - ...`.
//!
//! For a rational `x = r/q` the map keeps the denominator and replaces the
//! numerator by `q mod r`, so the orbit of a rational is a remainder chain
//! that reaches zero after at most `r` steps.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{check_unit, floor_reciprocal, BigRational, ExtNat, RatInterval};
use crate::error::{Error, Result};

/// A finite, strictly increasing list of positive digits.
///
/// The empty prefix stands for the all-infinity sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct DigitPrefix(Vec<BigUint>);

impl DigitPrefix {
    pub fn new(digits: Vec<BigUint>) -> Result<Self> {
        for (i, d) in digits.iter().enumerate() {
            if d.is_zero() || (i > 0 && d <= &digits[i - 1]) {
                return Err(Error::NotStrictlyIncreasing { index: i });
            }
        }
        Ok(DigitPrefix(digits))
    }

    pub fn from_u64s(digits: &[u64]) -> Result<Self> {
        DigitPrefix::new(digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    pub fn empty() -> Self {
        DigitPrefix(Vec::new())
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&BigUint> {
        self.0.last()
    }

    /// The `k`-th digit (1-based), `inf` past the end.
    pub fn term(&self, k: usize) -> ExtNat {
        assert!(k >= 1, "digit indices start at 1");
        match self.0.get(k - 1) {
            Some(d) => ExtNat::Finite(d.clone()),
            None => ExtNat::Infinity,
        }
    }

    /// Appends `next`, which must exceed the current last digit.
    pub fn extended(&self, next: BigUint) -> Result<Self> {
        let mut digits = self.0.clone();
        digits.push(next);
        DigitPrefix::new(digits)
    }

    /// The first `n` digits.
    pub fn truncated(&self, n: usize) -> Self {
        DigitPrefix(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `true` when `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &DigitPrefix) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn into_vec(self) -> Vec<BigUint> {
        self.0
    }
}

impl fmt::Display for DigitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for DigitPrefix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|d| d.to_string()))
    }
}

/// One step of the algorithm: `(d_1(x), T(x))`.
pub fn digit_step(x: &BigRational) -> Result<(ExtNat, BigRational)> {
    let d = floor_reciprocal(x)?;
    let t = match &d {
        ExtNat::Infinity => BigRational::zero(),
        ExtNat::Finite(d) => BigRational::one() - x * BigRational::from_integer(BigInt::from(d.clone())),
    };
    Ok((d, t))
}

/// Remainder-chain form of `x` in `[0, 1]`: `x = num / den`.
#[derive(Debug, Clone)]
struct Orbit {
    num: BigUint,
    den: BigUint,
}

impl Orbit {
    fn new(x: &BigRational) -> Result<Self> {
        check_unit(x)?;
        Ok(Orbit {
            num: x.numer().magnitude().clone(),
            den: x.denom().magnitude().clone(),
        })
    }

    fn digit(&self) -> Option<BigUint> {
        (!self.num.is_zero()).then(|| &self.den / &self.num)
    }

    /// Applies T given the digit returned by [`Orbit::digit`].
    fn advance(&mut self, d: &BigUint) {
        self.num = &self.den - d * &self.num;
    }

    fn value(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }
}

/// All digits of a rational `x` in `[0, 1]`; empty for `x = 0`.
pub fn digits_rational(x: &BigRational) -> Result<DigitPrefix> {
    let mut orbit = Orbit::new(x)?;
    let mut digits = Vec::new();
    while let Some(d) = orbit.digit() {
        let before = orbit.num.clone();
        orbit.advance(&d);
        // T replaces the numerator by den mod num, which is strictly smaller.
        debug_assert!(orbit.num < before);
        digits.push(d);
    }
    Ok(DigitPrefix(digits))
}

/// Why [`safe_digits`] stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SafeStatus {
    /// `max_n` digits were certified.
    Exhausted,
    /// The interval straddles a fundamental-interval boundary.
    Ambiguous,
    /// Both endpoint orbits reached 0 with the same digits.
    Terminated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeDigitsResult {
    pub prefix: DigitPrefix,
    pub status: SafeStatus,
    /// `T^n` applied to the input interval, `n = prefix.len()`.
    pub image: RatInterval,
}

/// Digits shared by every real number in `xr`.
///
/// T is affine and decreasing on each fundamental interval, so once both
/// endpoints agree on a digit the image of the interval is the interval
/// spanned by the images of its endpoints.
pub fn safe_digits(xr: &RatInterval, max_n: usize) -> Result<SafeDigitsResult> {
    let mut lo = Orbit::new(xr.lo())?;
    let mut hi = Orbit::new(xr.hi())?;
    let mut digits = Vec::new();
    let status = loop {
        let (d_lo, d_hi) = (lo.digit(), hi.digit());
        match (d_lo, d_hi) {
            (None, None) => break SafeStatus::Terminated,
            (Some(a), Some(b)) if a == b => {
                if digits.len() == max_n {
                    break SafeStatus::Exhausted;
                }
                lo.advance(&a);
                hi.advance(&a);
                std::mem::swap(&mut lo, &mut hi);
                digits.push(a);
            }
            _ => break SafeStatus::Ambiguous,
        }
    };
    let image = RatInterval::new(lo.value(), hi.value())?;
    Ok(SafeDigitsResult {
        prefix: DigitPrefix(digits),
        status,
        image,
    })
}

/// The alternating partial sums `s_1, ..., s_n` of the expansion with the
/// given digits.
pub fn partial_sums(prefix: &DigitPrefix) -> Result<Vec<BigRational>> {
    if prefix.is_empty() {
        return Err(Error::EmptyPrefix);
    }
    // s_k = N_k / D_k with D_k = d_1...d_k and N_k = N_{k-1} d_k +- 1.
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut sums = Vec::with_capacity(prefix.len());
    for (k, d) in prefix.digits().iter().enumerate() {
        let d = BigInt::from(d.clone());
        num *= &d;
        den *= &d;
        if k % 2 == 0 {
            num += 1;
        } else {
            num -= 1;
        }
        sums.push(BigRational::new(num.clone(), den.clone()));
    }
    Ok(sums)
}

/// `[T(x), T^2(x), ..., T^n(x)]`. Zero is a fixed point, so the list keeps
/// its full length after the orbit reaches 0.
pub fn shift_orbit(x: &BigRational, n: usize) -> Result<Vec<BigRational>> {
    let mut orbit = Orbit::new(x)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if let Some(d) = orbit.digit() {
            orbit.advance(&d);
        }
        out.push(orbit.value());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn prefix(d: &[u64]) -> DigitPrefix {
        DigitPrefix::from_u64s(d).unwrap()
    }

    #[test]
    fn digit_step_examples() {
        assert_eq!(digit_step(&rat(0, 1)).unwrap(), (ExtNat::Infinity, rat(0, 1)));
        assert_eq!(digit_step(&rat(1, 1)).unwrap(), (ExtNat::finite(1u32), rat(0, 1)));
        assert_eq!(digit_step(&rat(7, 10)).unwrap(), (ExtNat::finite(1u32), rat(3, 10)));
        assert!(digit_step(&rat(11, 10)).is_err());
    }

    #[test]
    fn digits_rational_examples() {
        assert_eq!(digits_rational(&rat(0, 1)).unwrap(), DigitPrefix::empty());
        assert_eq!(digits_rational(&rat(1, 1)).unwrap(), prefix(&[1]));
        assert_eq!(digits_rational(&rat(2, 3)).unwrap(), prefix(&[1, 3]));
        assert_eq!(digits_rational(&rat(7, 10)).unwrap(), prefix(&[1, 3, 10]));
        assert!(digits_rational(&rat(-1, 10)).is_err());
    }

    #[test]
    fn prefix_validation() {
        assert!(DigitPrefix::from_u64s(&[1, 1]).is_err());
        assert!(DigitPrefix::from_u64s(&[0, 2]).is_err());
        assert_eq!(
            DigitPrefix::from_u64s(&[3, 2]),
            Err(Error::NotStrictlyIncreasing { index: 1 })
        );
        assert_eq!(prefix(&[2, 5]).term(3), ExtNat::Infinity);
    }

    #[test]
    fn safe_digits_examples() {
        let r = safe_digits(&RatInterval::new(rat(2, 5), rat(9, 20)).unwrap(), 5).unwrap();
        assert_eq!((r.prefix, r.status), (prefix(&[2]), SafeStatus::Ambiguous));
        assert_eq!(r.image, RatInterval::new(rat(1, 10), rat(1, 5)).unwrap());

        let r = safe_digits(&RatInterval::point(rat(1, 3)).unwrap(), 5).unwrap();
        assert_eq!((r.prefix, r.status), (prefix(&[3]), SafeStatus::Terminated));

        let r = safe_digits(&RatInterval::unit(), 5).unwrap();
        assert_eq!((r.prefix, r.status), (DigitPrefix::empty(), SafeStatus::Ambiguous));

        let r = safe_digits(&RatInterval::point(rat(7, 10)).unwrap(), 2).unwrap();
        assert_eq!((r.prefix, r.status), (prefix(&[1, 3]), SafeStatus::Exhausted));
    }

    #[test]
    fn partial_sums_examples() {
        assert_eq!(partial_sums(&prefix(&[2])).unwrap(), vec![rat(1, 2)]);
        assert_eq!(
            partial_sums(&prefix(&[1, 3, 10])).unwrap(),
            vec![rat(1, 1), rat(2, 3), rat(7, 10)]
        );
        assert_eq!(partial_sums(&prefix(&[1, 2])).unwrap(), vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(partial_sums(&DigitPrefix::empty()), Err(Error::EmptyPrefix));
    }

    #[test]
    fn shift_orbit_examples() {
        assert_eq!(
            shift_orbit(&rat(7, 10), 3).unwrap(),
            vec![rat(3, 10), rat(1, 10), rat(0, 1)]
        );
        assert_eq!(shift_orbit(&rat(0, 1), 3).unwrap(), vec![rat(0, 1); 3]);
        assert_eq!(shift_orbit(&rat(1, 2), 2).unwrap(), vec![rat(0, 1); 2]);
    }

    fn unit_rational() -> impl Strategy<Value = BigRational> {
        (1u64..1_000_000)
            .prop_flat_map(|q| (0..=q, Just(q)))
            .prop_map(|(p, q)| rat(p as i64, q as i64))
    }

    proptest! {
        #[test]
        fn digits_strictly_increase_and_count_is_bounded(x in unit_rational()) {
            let d = digits_rational(&x).unwrap();
            prop_assert!(DigitPrefix::new(d.digits().to_vec()).is_ok());
            prop_assert!(BigUint::from(d.len()) <= *x.numer().magnitude());
        }

        #[test]
        fn last_gap_is_at_least_two(x in unit_rational()) {
            let d = digits_rational(&x).unwrap();
            if d.len() >= 2 && x < BigRational::one() {
                let n = d.len();
                prop_assert!(d.digits()[n - 1] >= &d.digits()[n - 2] + 2u32);
            }
        }

        #[test]
        fn partial_sums_nest(x in unit_rational()) {
            let d = digits_rational(&x).unwrap();
            prop_assume!(!d.is_empty());
            let s = partial_sums(&d).unwrap();
            // Even-indexed sums increase, odd-indexed decrease, evens stay below odds.
            for k in 2..s.len() {
                if k % 2 == 0 {
                    prop_assert!(s[k] <= s[k - 2]);
                } else {
                    prop_assert!(s[k] >= s[k - 2]);
                }
            }
            for k in 1..s.len() {
                prop_assert!(s[k] <= s[0]);
            }
            prop_assert_eq!(s.last().unwrap(), &x);
        }

        #[test]
        fn safe_digits_are_shared_by_every_inner_rational(
            a in unit_rational(), b in unit_rational(), t in 0u32..=64,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let xr = RatInterval::new(lo.clone(), hi.clone()).unwrap();
            let got = safe_digits(&xr, 40).unwrap();
            let y = &lo + (&hi - &lo) * rat(t as i64, 64);
            prop_assert!(got.prefix.is_prefix_of(&digits_rational(&y).unwrap()));
        }

        #[test]
        fn orbit_matches_digit_steps(x in unit_rational()) {
            let orbit = shift_orbit(&x, 6).unwrap();
            let mut cur = x.clone();
            for t in orbit {
                cur = digit_step(&cur).unwrap().1;
                prop_assert_eq!(&cur, &t);
            }
        }
    }
}
