//! Exact numeric substrate: rationals, extended naturals, rational
//! enclosures and the integer kernels (floors, roots, logarithms) that every
//! other module leans on.

mod interval;
mod log;
mod roots;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

pub use interval::{Enclosure, RatInterval};
pub use log::{exp_bounds, ln2_bounds, ln_bounds, log2_bounds, Log2Bounds, LOG_FRAC_BITS};
pub use roots::{ceil_root_power, floor_root_power, integer_root};

use crate::error::{Error, Result};

/// An element of the extended positive integers: a natural `>= 1` or
/// `Infinity`.
///
/// `Infinity` only enters arithmetic through `c / Infinity = 0` and
/// `Infinity^s = Infinity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Finite(BigUint),
    Infinity,
}

impl ExtNat {
    pub fn finite(value: impl Into<BigUint>) -> Self {
        let value = value.into();
        assert!(!value.is_zero(), "extended naturals start at 1");
        ExtNat::Finite(value)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNat::Infinity)
    }

    pub fn as_finite(&self) -> Option<&BigUint> {
        match self {
            ExtNat::Finite(v) => Some(v),
            ExtNat::Infinity => None,
        }
    }

    /// `1 / self`, with `1 / Infinity = 0`.
    pub fn recip(&self) -> BigRational {
        match self {
            ExtNat::Finite(v) => BigRational::new(BigInt::one(), BigInt::from(v.clone())),
            ExtNat::Infinity => BigRational::zero(),
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (ExtNat::Infinity, ExtNat::Infinity) => Equal,
            (ExtNat::Infinity, _) => Greater,
            (_, ExtNat::Infinity) => Less,
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinity => f.write_str("inf"),
        }
    }
}

/// Checks `0 <= x <= 1`.
pub fn check_unit(x: &BigRational) -> Result<()> {
    if x.is_negative() || *x > BigRational::one() {
        return Err(Error::domain(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

/// `floor(1/x)` for `x` in `(0, 1]`, `Infinity` for `x = 0`.
pub fn floor_reciprocal(x: &BigRational) -> Result<ExtNat> {
    check_unit(x)?;
    if x.is_zero() {
        return Ok(ExtNat::Infinity);
    }
    let (num, den) = (x.numer().magnitude(), x.denom().magnitude());
    Ok(ExtNat::Finite(den / num))
}

/// Parses `p/q` or a bare integer `p`. Decimal input is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return Err(err());
    }
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `x` as a `(p, q)` pair of `u32`, for exponents that drive integer roots.
pub(crate) fn small_parts(x: &BigRational, what: &str) -> Result<(u32, u32)> {
    use num_traits::ToPrimitive;
    if !x.is_positive() {
        return Err(Error::domain(format!("{what} must be positive, got {x}")));
    }
    let p = x.numer().to_u32();
    let q = x.denom().to_u32();
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::domain(format!(
            "{what} = {x} has oversized numerator or denominator"
        ))),
    }
}

/// `floor(q * 2^bits) / 2^bits`.
pub(crate) fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scaled = (x.numer() << bits as usize).div_floor(x.denom());
    BigRational::new(scaled, BigInt::one() << bits as usize)
}

/// `ceil(q * 2^bits) / 2^bits`.
pub(crate) fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scaled = -((-(x.numer() << bits as usize)).div_floor(x.denom()));
    BigRational::new(scaled, BigInt::one() << bits as usize)
}

/// Rounds `x >= 0` outward to a dyadic keeping about `prec` significant bits.
pub(crate) fn round_relative(x: &BigRational, prec: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let magnitude = x.numer().bits() as i64 - x.denom().bits() as i64;
    let bits = prec as i64 - magnitude + 1;
    if bits >= 0 {
        return if up {
            round_up(x, bits as u32)
        } else {
            round_down(x, bits as u32)
        };
    }
    // Round to a multiple of 2^shift.
    let shift = (-bits) as usize;
    let den = x.denom() << shift;
    let q = if up {
        -((-x.numer()).div_floor(&den))
    } else {
        x.numer().div_floor(&den)
    };
    BigRational::from_integer(q << shift)
}
