//! Witness factories: digit rules with a known convergence exponent, and
//! witnesses placed inside a requested interval.

mod rule;

pub use rule::{CustomRule, DigitRule};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{BigRational, RatInterval};
use crate::digits::DigitPrefix;
use crate::error::{Error, Result};
use crate::sequence::{fundamental_interval, locate_cylinder, phi_enclosure, FundInterval};
use crate::DEFAULT_PRECISION_BITS;

/// Number of leading terms whose strict increase is checked explicitly.
pub const VERIFIED_GAPS: usize = 64;

fn check_alpha(alpha: &BigRational) -> Result<()> {
    if alpha < &BigRational::zero() || alpha > &BigRational::one() {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

/// The rule continuing `prefix` with exponent `alpha`: a tower for
/// `alpha = 0`, otherwise `floor((s_M + i)^(1/alpha))`.
pub fn build_sigma_alpha(prefix: &DigitPrefix, alpha: &BigRational) -> Result<DigitRule> {
    check_alpha(alpha)?;
    let rule = if alpha.is_zero() {
        DigitRule::Tower { prefix: prefix.clone() }
    } else {
        DigitRule::PowerFloor {
            prefix: prefix.clone(),
            alpha: alpha.clone(),
        }
    };
    rule.validate()?;
    rule.verify_increasing(prefix.len() + VERIFIED_GAPS)?;
    Ok(rule)
}

/// The binary-perturbed rule `floor((e_k + 2k - 1)^(1/alpha))`, with the
/// tower variant `(e_k + 2k - 1)^k` at `alpha = 0`.
pub fn build_binary_family(alpha: &BigRational, bits: &[bool]) -> Result<DigitRule> {
    check_alpha(alpha)?;
    let rule = DigitRule::BinaryPerturbed {
        alpha: alpha.clone(),
        bits: bits.to_vec(),
    };
    rule.validate()?;
    rule.verify_increasing(bits.len().max(1) + VERIFIED_GAPS)?;
    Ok(rule)
}

/// Keeps the first `j` digits of `prefix` and continues with
/// `floor((s_j + i)^(1/s))`, whose `s`-power series diverges.
pub fn build_divergent_family(prefix: &DigitPrefix, s_exp: &BigRational, j: usize) -> Result<DigitRule> {
    if s_exp <= &BigRational::zero() || s_exp > &BigRational::one() {
        return Err(Error::domain(format!("s must lie in (0, 1], got {s_exp}")));
    }
    if j == 0 || j > prefix.len() {
        return Err(Error::domain(format!(
            "j = {j} must lie between 1 and the prefix length {}",
            prefix.len()
        )));
    }
    let rule = DigitRule::PowerFloor {
        prefix: prefix.truncated(j),
        alpha: s_exp.clone(),
    };
    rule.validate()?;
    rule.verify_increasing(j + VERIFIED_GAPS)?;
    Ok(rule)
}

/// A point with a certified exponent, located inside a cylinder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rule: DigitRule,
    pub cylinder: FundInterval,
    pub enclosure: RatInterval,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub certificate: BigRational,
    pub container: Option<RatInterval>,
}

/// A witness of exponent `alpha` whose value lies in `u`.
///
/// The enclosure is formed from partial sums past the first two free terms,
/// which lie strictly inside the cylinder's interval.
pub fn witness_in_interval(u: &RatInterval, alpha: &BigRational, precision_bits: u32) -> Result<Witness> {
    check_alpha(alpha)?;
    let sigma = locate_cylinder(u)?;
    let rule = build_sigma_alpha(&sigma, alpha)?;
    let (enclosure, _) = phi_enclosure(&rule, precision_bits, sigma.len() + 2)?;
    let cylinder = fundamental_interval(&sigma)?;
    let bounds = cylinder.bounds();
    assert!(bounds.interior_contains(&enclosure), "witness escaped its cylinder");
    assert!(u.contains_interval(&bounds), "cylinder escaped its container");
    Ok(Witness {
        rule,
        cylinder,
        enclosure,
        certificate: alpha.clone(),
        container: Some(u.clone()),
    })
}

/// A witness of exponent `c` strictly between `x` and `y`.
pub fn ivp_witness(x: &BigRational, y: &BigRational, c: &BigRational) -> Result<Witness> {
    if x >= y {
        return Err(Error::DegenerateInterval {
            lo: x.to_string(),
            hi: y.to_string(),
        });
    }
    let u = RatInterval::new(x.clone(), y.clone())?;
    let w = witness_in_interval(&u, c, DEFAULT_PRECISION_BITS)?;
    debug_assert!(w.enclosure.lo() > x && w.enclosure.hi() < y);
    Ok(w)
}
