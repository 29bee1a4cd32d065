//! The space of Pierce sequences: strictly increasing digit sequences over
//! the extended naturals, padded with `inf` once they stop.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{BigRational, Enclosure, ExtNat, RatInterval};
use crate::constructions::DigitRule;
use crate::digits::{digits_rational, DigitPrefix};
use crate::error::{Error, Result};

/// An element of the sequence space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PierceSeq {
    /// Finitely many digits followed by `inf` forever. The empty prefix is
    /// the all-infinity sequence.
    Finite(DigitPrefix),
    /// An infinite strictly increasing sequence given by a rule.
    Infinite(DigitRule),
}

impl PierceSeq {
    pub fn term(&self, k: u64) -> ExtNat {
        match self {
            PierceSeq::Finite(p) => p.term(k as usize),
            PierceSeq::Infinite(r) => ExtNat::Finite(r.term(k)),
        }
    }

    /// Number of finite digits, `None` for infinite sequences.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            PierceSeq::Finite(p) => Some(p.len()),
            PierceSeq::Infinite(_) => None,
        }
    }
}

impl From<DigitPrefix> for PierceSeq {
    fn from(p: DigitPrefix) -> Self {
        PierceSeq::Finite(p)
    }
}

impl From<DigitRule> for PierceSeq {
    fn from(r: DigitRule) -> Self {
        PierceSeq::Infinite(r)
    }
}

/// Value of the evaluation map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PhiValue {
    Exact(#[serde(serialize_with = "crate::serde_util::rational")] BigRational),
    Enclosure(RatInterval),
}

impl PhiValue {
    pub fn as_interval(&self) -> RatInterval {
        match self {
            PhiValue::Exact(x) => RatInterval::point(x.clone()).expect("phi lies in [0, 1]"),
            PhiValue::Enclosure(e) => e.clone(),
        }
    }
}

/// Exact value of the finite alternating sum, by Horner's rule from the
/// last digit: `v <- (1 - v) / d`.
pub fn phi_finite(prefix: &DigitPrefix) -> BigRational {
    let mut v = BigRational::zero();
    for d in prefix.digits().iter().rev() {
        v = (BigRational::one() - v) / BigRational::from_integer(BigInt::from(d.clone()));
    }
    v
}

/// Evaluates the alternating series of `s`.
///
/// Finite sequences give an exact rational. Infinite ones give an interval
/// between two consecutive partial sums whose width is at most
/// `2^-precision_bits`.
pub fn phi_eval(s: &PierceSeq, precision_bits: u32) -> Result<PhiValue> {
    match s {
        PierceSeq::Finite(p) => Ok(PhiValue::Exact(phi_finite(p))),
        PierceSeq::Infinite(rule) => {
            let (enc, _) = phi_enclosure(rule, precision_bits, 1)?;
            Ok(PhiValue::Enclosure(enc))
        }
    }
}

/// Partial-sum bracket of an infinite rule, using at least `min_terms`
/// terms. Returns the interval and the number of terms consumed.
pub fn phi_enclosure(rule: &DigitRule, precision_bits: u32, min_terms: usize) -> Result<(RatInterval, usize)> {
    let target = BigUint::one() << precision_bits as usize;
    let mut num = BigInt::zero();
    let mut den = BigUint::one();
    let mut prev: Option<BigUint> = None;
    let mut n = 0usize;
    loop {
        let k = n as u64 + 1;
        let d = rule.term(k);
        if d.is_zero() || prev.as_ref().is_some_and(|p| &d <= p) {
            return Err(Error::NotStrictlyIncreasing { index: n });
        }
        let next_den = &den * &d;
        if n >= min_terms.max(1) && next_den >= target {
            // s_n and s_{n+1} bracket the limit of the alternating series.
            let s_n = BigRational::new(num.clone(), BigInt::from(den.clone()));
            let next_num = &num * BigInt::from(d.clone()) + if n.is_multiple_of(2) { 1 } else { -1 };
            let s_next = BigRational::new(next_num, BigInt::from(next_den));
            let enc = Enclosure::spanning(s_n, s_next);
            return Ok((RatInterval::try_from(enc)?, n));
        }
        num = &num * BigInt::from(d.clone()) + if n.is_multiple_of(2) { 1 } else { -1 };
        den = next_den;
        prev = Some(d);
        n += 1;
    }
}

/// The two preimages of a rational in `(0, 1)`: the digit sequence and the
/// alternative whose last digit is split into `d_n - 1, d_n`.
pub fn dual_representation(x: &BigRational) -> Result<(DigitPrefix, DigitPrefix)> {
    if x <= &BigRational::zero() || x >= &BigRational::one() {
        return Err(Error::domain(format!("{x} is not in the open interval (0, 1)")));
    }
    let sigma = digits_rational(x)?;
    let mut alt = sigma.digits().to_vec();
    let last = alt.pop().expect("x > 0 has at least one digit");
    alt.push(&last - 1u32);
    alt.push(last);
    let tau = DigitPrefix::new(alt)?;
    Ok((sigma, tau))
}

/// A fundamental interval: the points whose first digits are `sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundInterval {
    pub sigma: DigitPrefix,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub left: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub right: BigRational,
    /// `(prod 1/sigma_j) / (sigma_n + 1)`.
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub diameter: BigRational,
}

impl FundInterval {
    pub fn bounds(&self) -> RatInterval {
        RatInterval::new(self.left.clone(), self.right.clone()).expect("fundamental intervals lie in [0, 1]")
    }
}

/// `sigma` with its last digit incremented.
pub fn hat(sigma: &DigitPrefix) -> Result<DigitPrefix> {
    let mut digits = sigma.digits().to_vec();
    let last = digits.pop().ok_or(Error::EmptyPrefix)?;
    digits.push(last + 1u32);
    DigitPrefix::new(digits)
}

/// Closed-form diameter `(prod_j 1/sigma_j) / (sigma_n + 1)`.
pub fn diameter_formula(sigma: &DigitPrefix) -> Result<BigRational> {
    let last = sigma.last().ok_or(Error::EmptyPrefix)?;
    let prod: BigUint = sigma.digits().iter().product();
    Ok(BigRational::new(BigInt::one(), BigInt::from(prod * (last + 1u32))))
}

/// The fundamental interval with endpoints `phi(sigma)` and `phi(hat sigma)`.
pub fn fundamental_interval(sigma: &DigitPrefix) -> Result<FundInterval> {
    let a = phi_finite(sigma);
    let b = phi_finite(&hat(sigma)?);
    let (left, right) = if a <= b { (a, b) } else { (b, a) };
    let diameter = diameter_formula(sigma)?;
    debug_assert_eq!(&right - &left, diameter);
    Ok(FundInterval {
        sigma: sigma.clone(),
        left,
        right,
        diameter,
    })
}

/// Membership of `t` in the cylinder of sequences starting with `sigma`.
pub fn cylinder_contains(sigma: &DigitPrefix, t: &PierceSeq) -> bool {
    sigma
        .digits()
        .iter()
        .enumerate()
        .all(|(i, d)| t.term(i as u64 + 1).as_finite() == Some(d))
}

/// Truncation of `sum_k 2^-k |1/s_k - 1/t_k|` at `depth` terms, with
/// `1/inf = 0`. The omitted tail is at most `2^-depth`.
pub fn rho_metric(s: &PierceSeq, t: &PierceSeq, depth: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for k in 1..=depth {
        let diff = s.term(k).recip() - t.term(k).recip();
        if !diff.is_zero() {
            let weight = BigRational::new(BigInt::one(), BigInt::one() << k as usize);
            acc += weight * num_traits::Signed::abs(&diff);
        }
    }
    acc
}

/// A prefix whose fundamental interval fits inside `u`.
///
/// Follows the digits of the midpoint of `u` and returns the first cell on
/// that path which fits. If the midpoint's expansion stops first, the
/// midpoint is the accumulation endpoint of the current cell's children and
/// the first child that fits is returned.
pub fn locate_cylinder(u: &RatInterval) -> Result<DigitPrefix> {
    if u.is_point() {
        return Err(Error::DegenerateInterval {
            lo: u.lo().to_string(),
            hi: u.hi().to_string(),
        });
    }
    let mid = (u.lo() + u.hi()) / BigRational::from_integer(2.into());
    let path = digits_rational(&mid)?;
    let mut prefix = DigitPrefix::empty();
    for d in path.digits() {
        prefix = prefix.extended(d.clone())?;
        if u.contains_interval(&fundamental_interval(&prefix)?.bounds()) {
            return Ok(prefix);
        }
    }
    // `mid = phi(prefix)` lies in the interior of `u`, and the children of
    // the prefix's cell shrink onto it, so this search terminates.
    let mut m = prefix.last().cloned().unwrap_or_default() + 1u32;
    loop {
        let candidate = prefix.extended(m.clone())?;
        if u.contains_interval(&fundamental_interval(&candidate)?.bounds()) {
            return Ok(candidate);
        }
        m += 1u32;
    }
}
