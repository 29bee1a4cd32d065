use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{floor_root_power, log2_bounds, small_parts, BigRational, Log2Bounds};
use crate::digits::DigitPrefix;
use crate::error::{Error, Result};

/// A term generator for a user-defined sequence. Carries no certificate.
#[derive(Clone)]
pub struct CustomRule {
    pub name: String,
    pub term: fn(u64) -> BigUint,
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule").field("name", &self.name).finish()
    }
}

impl PartialEq for CustomRule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for CustomRule {}

/// A symbolic infinite digit sequence. `term(k)` is defined analytically for
/// every `k >= 1`; every family except `Custom` has a closed-form exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitRule {
    /// `prefix` then `floor((s_M + i)^(1/alpha))` for `i >= 1`, where `s_M` is
    /// the last prefix digit (1 for an empty prefix). `alpha` in `(0, 1]`.
    PowerFloor {
        prefix: DigitPrefix,
        alpha: BigRational,
    },
    /// `prefix` then `(s_M + i)^(M + i)`; for an empty prefix the `k`-th term
    /// is `(1 + k)^(k + 1)`.
    Tower {
        prefix: DigitPrefix,
    },
    /// `k + offset`.
    Linear {
        offset: u64,
    },
    /// `floor(k^exponent)` with `exponent >= 1`.
    Monomial {
        exponent: BigRational,
    },
    /// `base^k` with `base >= 2`.
    Geometric {
        base: u64,
    },
    /// `floor((e_k + 2k - 1)^(1/alpha))`, or `(e_k + 2k - 1)^k` when
    /// `alpha = 0`. Bits past the end of the list read as 0.
    BinaryPerturbed {
        alpha: BigRational,
        bits: Vec<bool>,
    },
    Custom(CustomRule),
}

impl DigitRule {
    /// The `k`-th term, `k >= 1`.
    pub fn term(&self, k: u64) -> BigUint {
        assert!(k >= 1, "digit indices start at 1");
        match self {
            DigitRule::PowerFloor { prefix, alpha } => match prefix_term(prefix, k) {
                Some(d) => d,
                None => {
                    let base = tail_base(prefix, k);
                    let (p, q) = exponent_parts(alpha);
                    floor_root_power(&base, p, q)
                }
            },
            DigitRule::Tower { prefix } => match prefix_term(prefix, k) {
                Some(d) => d,
                None => {
                    let (base, exp) = tower_parts(prefix, k);
                    Pow::pow(&base, exp)
                }
            },
            DigitRule::Linear { offset } => BigUint::from(k) + *offset,
            DigitRule::Monomial { exponent } => {
                let (q, p) = exponent_parts(exponent);
                floor_root_power(&BigUint::from(k), p, q)
            }
            DigitRule::Geometric { base } => Pow::pow(&BigUint::from(*base), k),
            DigitRule::BinaryPerturbed { alpha, bits } => {
                let base = binary_base(bits, k);
                if alpha == &BigRational::from_integer(0.into()) {
                    Pow::pow(&base, k)
                } else {
                    let (p, q) = exponent_parts(alpha);
                    floor_root_power(&base, p, q)
                }
            }
            DigitRule::Custom(c) => (c.term)(k),
        }
    }

    /// Bounds on `log2(term(k))`, using the closed form where the term itself
    /// would be astronomically large.
    pub fn log2_term(&self, k: u64, frac_bits: u32) -> Log2Bounds {
        match self {
            DigitRule::Tower { prefix } if prefix_term(prefix, k).is_none() => {
                let (base, exp) = tower_parts(prefix, k);
                log2_bounds(&base, frac_bits).scale(exp as u64)
            }
            DigitRule::Geometric { base } => log2_bounds(&BigUint::from(*base), frac_bits).scale(k),
            DigitRule::BinaryPerturbed { alpha, bits } if alpha == &BigRational::from_integer(0.into()) => {
                log2_bounds(&binary_base(bits, k), frac_bits).scale(k)
            }
            _ => log2_bounds(&self.term(k), frac_bits),
        }
    }

    /// The first `n` terms.
    pub fn terms(&self, n: usize) -> Vec<BigUint> {
        (1..=n as u64).map(|k| self.term(k)).collect()
    }

    /// The first `n` terms as a prefix, failing if they do not strictly increase.
    pub fn prefix(&self, n: usize) -> Result<DigitPrefix> {
        DigitPrefix::new(self.terms(n))
    }

    /// Checks strict increase over the first `depth` terms.
    pub fn verify_increasing(&self, depth: usize) -> Result<()> {
        self.prefix(depth).map(|_| ())
    }

    /// Short family identifier.
    pub fn family(&self) -> &'static str {
        match self {
            DigitRule::PowerFloor { .. } => "power-floor",
            DigitRule::Tower { .. } => "tower",
            DigitRule::Linear { .. } => "linear",
            DigitRule::Monomial { .. } => "monomial",
            DigitRule::Geometric { .. } => "geometric",
            DigitRule::BinaryPerturbed { .. } => "binary",
            DigitRule::Custom(_) => "custom",
        }
    }

    /// Validates family parameters.
    pub fn validate(&self) -> Result<()> {
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::one();
        match self {
            DigitRule::PowerFloor { alpha, .. } => {
                if alpha <= &zero || alpha > &one {
                    return Err(Error::domain(format!("power-floor needs alpha in (0, 1], got {alpha}")));
                }
                small_parts(alpha, "alpha").map(|_| ())
            }
            DigitRule::BinaryPerturbed { alpha, .. } => {
                if alpha < &zero || alpha > &one {
                    return Err(Error::domain(format!(
                        "binary family needs alpha in [0, 1], got {alpha}"
                    )));
                }
                if alpha > &zero {
                    small_parts(alpha, "alpha")?;
                }
                Ok(())
            }
            DigitRule::Monomial { exponent } => {
                if exponent < &one {
                    return Err(Error::domain(format!("monomial needs exponent >= 1, got {exponent}")));
                }
                small_parts(exponent, "exponent").map(|_| ())
            }
            DigitRule::Geometric { base } if *base < 2 => {
                Err(Error::domain(format!("geometric needs base >= 2, got {base}")))
            }
            _ => Ok(()),
        }
    }
}

fn prefix_term(prefix: &DigitPrefix, k: u64) -> Option<BigUint> {
    prefix.digits().get(k as usize - 1).cloned()
}

/// `s_M + (k - M)`, with `s_0 = 1`.
fn tail_base(prefix: &DigitPrefix, k: u64) -> BigUint {
    let m = prefix.len() as u64;
    let last = prefix.last().cloned().unwrap_or_else(BigUint::one);
    last + (k - m)
}

fn tower_parts(prefix: &DigitPrefix, k: u64) -> (BigUint, u32) {
    let exp = if prefix.is_empty() { k + 1 } else { k };
    (tail_base(prefix, k), exp.to_u32().expect("tower exponent overflow"))
}

fn binary_base(bits: &[bool], k: u64) -> BigUint {
    let eps = bits.get(k as usize - 1).copied().unwrap_or(false) as u64;
    BigUint::from(eps + 2 * k - 1)
}

/// `(p, q)` with `x = p/q`; callers validate the sizes up front.
fn exponent_parts(x: &BigRational) -> (u32, u32) {
    small_parts(x, "exponent").expect("rule parameters are validated at construction")
}

impl fmt::Display for DigitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitRule::PowerFloor { prefix, alpha } => write!(f, "power-floor(prefix={prefix}, alpha={alpha})"),
            DigitRule::Tower { prefix } => write!(f, "tower(prefix={prefix})"),
            DigitRule::Linear { offset } => write!(f, "linear(offset={offset})"),
            DigitRule::Monomial { exponent } => write!(f, "monomial(exponent={exponent})"),
            DigitRule::Geometric { base } => write!(f, "geometric(base={base})"),
            DigitRule::BinaryPerturbed { alpha, bits } => {
                let bits: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "binary(alpha={alpha}, bits={bits})")
            }
            DigitRule::Custom(c) => write!(f, "custom({})", c.name),
        }
    }
}

impl Serialize for DigitRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("family", self.family())?;
        match self {
            DigitRule::PowerFloor { prefix, alpha } => {
                map.serialize_entry("prefix", prefix)?;
                map.serialize_entry("alpha", &alpha.to_string())?;
            }
            DigitRule::Tower { prefix } => map.serialize_entry("prefix", prefix)?,
            DigitRule::Linear { offset } => map.serialize_entry("offset", offset)?,
            DigitRule::Monomial { exponent } => map.serialize_entry("exponent", &exponent.to_string())?,
            DigitRule::Geometric { base } => map.serialize_entry("base", base)?,
            DigitRule::BinaryPerturbed { alpha, bits } => {
                map.serialize_entry("alpha", &alpha.to_string())?;
                let bits: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                map.serialize_entry("bits", &bits)?;
            }
            DigitRule::Custom(c) => map.serialize_entry("name", &c.name)?,
        }
        map.end()
    }
}
