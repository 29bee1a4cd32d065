use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::BigRational;
use crate::error::{Error, Result};

/// A closed rational interval `[lo, hi]` with no range restriction.
///
/// Used for verified enclosures of irrational quantities (logarithms,
/// exponentials, infinite alternating sums).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "enclosure bounds out of order: {lo} > {hi}");
        Enclosure { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    /// Builds an enclosure from two bounds in either order.
    pub fn spanning(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            Enclosure { lo: a, hi: b }
        } else {
            Enclosure { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Multiplies by an exact scalar.
    pub fn scale(&self, c: &BigRational) -> Enclosure {
        Enclosure::spanning(&self.lo * c, &self.hi * c)
    }

    /// Product of two enclosures, taking all four corner products.
    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let corners = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = corners.iter().min().unwrap().clone();
        let hi = corners.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    /// Pointwise maximum: encloses `max(a, b)` for `a` in `self`, `b` in `other`.
    pub fn max(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Midpoint, for display only.
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// `true` when every point of the enclosure is strictly below `x`.
    pub fn certainly_below(&self, x: &BigRational) -> bool {
        &self.hi < x
    }

    /// `true` when every point of the enclosure is strictly above `x`.
    pub fn certainly_above(&self, x: &BigRational) -> bool {
        &self.lo > x
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A closed subinterval `[lo, hi]` of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo.is_negative() || hi > BigRational::one() || lo > hi {
            return Err(Error::domain(format!("[{lo}, {hi}] is not a subinterval of [0, 1]")));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: BigRational) -> Result<Self> {
        RatInterval::new(x.clone(), x)
    }

    pub fn unit() -> Self {
        RatInterval {
            lo: BigRational::zero(),
            hi: BigRational::one(),
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Strict containment: `other` lies in the open interval `(lo, hi)`.
    pub fn interior_contains(&self, other: &RatInterval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn to_enclosure(&self) -> Enclosure {
        Enclosure::new(self.lo.clone(), self.hi.clone())
    }
}

impl TryFrom<Enclosure> for RatInterval {
    type Error = Error;
    fn try_from(e: Enclosure) -> Result<Self> {
        RatInterval::new(e.lo, e.hi)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
