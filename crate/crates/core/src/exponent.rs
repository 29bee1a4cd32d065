//! Convergence exponents of digit sequences.
//!
//! `psi_n = log n / log s_n`, and the exponent of a sequence is the limsup of
//! `psi_n`. Finite data never determines a limsup, so window scans are
//! reported as diagnostics and only the rule families carry a certificate.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    ceil_root_power, floor_root_power, integer_root, log2_bounds, small_parts, BigRational, Enclosure, RatInterval,
    LOG_FRAC_BITS,
};
use crate::constructions::DigitRule;
use crate::digits::{safe_digits, SafeDigitsResult, SafeStatus};
use crate::error::{Error, Result};
use crate::sequence::PierceSeq;

/// A non-negative fraction with `u128` parts, compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    const ZERO: Frac = Frac { num: 0, den: 1 };
    const ONE: Frac = Frac { num: 1, den: 1 };

    fn less_than(self, other: Frac) -> bool {
        mul_wide(self.num, other.den) < mul_wide(other.num, self.den)
    }

    fn max(self, other: Frac) -> Frac {
        if self.less_than(other) {
            other
        } else {
            self
        }
    }

    fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

/// Full 256-bit product as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1 << 64) - 1;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let low = (p00 & MASK) | (mid << 64);
    let high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (high, low)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PsiBounds {
    lo: Frac,
    hi: Frac,
}

impl PsiBounds {
    const ZERO: PsiBounds = PsiBounds {
        lo: Frac::ZERO,
        hi: Frac::ZERO,
    };

    fn max(self, other: PsiBounds) -> PsiBounds {
        PsiBounds {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn to_enclosure(self) -> Enclosure {
        Enclosure::new(self.lo.to_rational(), self.hi.to_rational())
    }
}

fn psi_bounds(s: &PierceSeq, n: u64, frac_bits: u32) -> Result<PsiBounds> {
    let log_den = match s {
        PierceSeq::Finite(p) => match p.digits().get(n as usize - 1) {
            None => return Ok(PsiBounds::ZERO),
            Some(d) => {
                check_growth(d, n)?;
                if d == &BigUint::from(n) {
                    return Ok(PsiBounds {
                        lo: Frac::ONE,
                        hi: Frac::ONE,
                    });
                }
                log2_bounds(d, frac_bits)
            }
        },
        PierceSeq::Infinite(rule) => {
            let small = matches!(
                rule,
                DigitRule::Linear { .. } | DigitRule::Monomial { .. } | DigitRule::Custom(_)
            );
            if small {
                let d = rule.term(n);
                check_growth(&d, n)?;
                if d == BigUint::from(n) {
                    return Ok(PsiBounds {
                        lo: Frac::ONE,
                        hi: Frac::ONE,
                    });
                }
            }
            rule.log2_term(n, frac_bits)
        }
    };
    let log_num = log2_bounds(&BigUint::from(n), frac_bits);
    let lo = Frac {
        num: log_num.lo,
        den: log_den.hi,
    };
    let mut hi = Frac {
        num: log_num.hi,
        den: log_den.lo,
    };
    if !hi.less_than(Frac::ONE) {
        hi = Frac::ONE;
    }
    Ok(PsiBounds { lo: lo.min_one(), hi })
}

impl Frac {
    fn min_one(self) -> Frac {
        if Frac::ONE.less_than(self) {
            Frac::ONE
        } else {
            self
        }
    }
}

/// A strictly increasing sequence of positive integers has `s_n >= n`.
fn check_growth(d: &BigUint, n: u64) -> Result<()> {
    if d < &BigUint::from(n) {
        return Err(Error::NotStrictlyIncreasing { index: n as usize - 1 });
    }
    Ok(())
}

/// Encloses `psi_n = log n / log s_n`; exactly 0 when `s_n = inf`.
pub fn psi_n(s: &PierceSeq, n: u64) -> Result<Enclosure> {
    if n < 2 {
        return Err(Error::domain(format!("psi_n needs n >= 2, got {n}")));
    }
    Ok(psi_bounds(s, n, LOG_FRAC_BITS)?.to_enclosure())
}

/// Encloses `max psi_n` over `lo <= n <= hi`; the empty window gives 0.
pub fn lambda_window(s: &PierceSeq, lo: u64, hi: u64) -> Result<Enclosure> {
    let lo = lo.max(2);
    if lo > hi {
        return Ok(PsiBounds::ZERO.to_enclosure());
    }
    let best = (lo..=hi)
        .into_par_iter()
        .map(|n| psi_bounds(s, n, LOG_FRAC_BITS))
        .try_reduce(|| PsiBounds::ZERO, |a, b| Ok(a.max(b)))?;
    Ok(best.to_enclosure())
}

/// A window diagnostic for the convergence exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaEstimate {
    pub window_lo: u64,
    pub window_hi: u64,
    /// Encloses `max psi_n` over the window.
    pub sup_value: Enclosure,
    /// Encloses `max psi_n` over `2 <= n <= window_hi`.
    pub running_max: Enclosure,
    pub certified: bool,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub certificate_alpha: Option<BigRational>,
    /// Number of digits certified from an interval input.
    pub certified_digits: Option<usize>,
    pub status: Option<SafeStatus>,
}

/// Tail window `[max(2, ceil(n/2)), n]` used as the limsup estimator.
pub fn tail_window(n_max: u64) -> (u64, u64) {
    (n_max.div_ceil(2).max(2), n_max)
}

/// Scans `psi_n` for `2 <= n <= n_max` and reports the maximum over the tail
/// window and over the whole range. Never certified.
pub fn lambda_truncated(s: &PierceSeq, n_max: u64) -> Result<LambdaEstimate> {
    if n_max < 2 {
        return Err(Error::domain(format!("window end must be >= 2, got {n_max}")));
    }
    let (lo, hi) = tail_window(n_max);
    let (tail, all) = (2..=n_max)
        .into_par_iter()
        .map(|n| psi_bounds(s, n, LOG_FRAC_BITS).map(|b| (if n >= lo { b } else { PsiBounds::ZERO }, b)))
        .try_reduce(
            || (PsiBounds::ZERO, PsiBounds::ZERO),
            |a, b| Ok((a.0.max(b.0), a.1.max(b.1))),
        )?;
    Ok(LambdaEstimate {
        window_lo: lo,
        window_hi: hi,
        sup_value: tail.to_enclosure(),
        running_max: all.to_enclosure(),
        certified: false,
        certificate_alpha: None,
        certified_digits: None,
        status: None,
    })
}

/// Window diagnostic for every real in `x`, using only digits shared by the
/// whole interval. A terminating expansion is a rational point, whose
/// exponent is certified to be 0.
pub fn lambda_star_truncated(x: &RatInterval, n_max: usize) -> Result<LambdaEstimate> {
    lambda_star_from_digits(safe_digits(x, n_max)?)
}

/// [`lambda_star_truncated`] on digits already certified by [`safe_digits`].
pub fn lambda_star_from_digits(safe: SafeDigitsResult) -> Result<LambdaEstimate> {
    let n_star = safe.prefix.len() as u64;
    let seq = PierceSeq::Finite(safe.prefix);
    let (lo, hi) = tail_window(n_star.max(2));
    let sup_value = if n_star >= 2 {
        lambda_window(&seq, lo, hi)?
    } else {
        PsiBounds::ZERO.to_enclosure()
    };
    let running_max = lambda_window(&seq, 2, n_star)?;
    let terminated = safe.status == SafeStatus::Terminated;
    Ok(LambdaEstimate {
        window_lo: lo,
        window_hi: n_star,
        sup_value,
        running_max,
        certified: terminated,
        certificate_alpha: terminated.then(BigRational::zero),
        certified_digits: Some(n_star as usize),
        status: Some(safe.status),
    })
}

/// The exact exponent of a certified rule family.
pub fn lambda_certified(rule: &DigitRule) -> Result<BigRational> {
    rule.validate()?;
    Ok(match rule {
        DigitRule::PowerFloor { alpha, .. } => alpha.clone(),
        DigitRule::BinaryPerturbed { alpha, .. } => alpha.clone(),
        DigitRule::Tower { .. } | DigitRule::Geometric { .. } => BigRational::zero(),
        DigitRule::Linear { .. } => BigRational::one(),
        DigitRule::Monomial { exponent } => exponent.recip(),
        DigitRule::Custom(c) => return Err(Error::Uncertified(c.name.clone())),
    })
}

/// Outcome of a divergence test for `sum 1/s_k^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Divergent,
    Convergent,
    Unknown,
}

/// Decides whether `sum 1/s_k^s` diverges for a rule family.
///
/// Power-floor and binary rules satisfy `s_k^s <= C k^(s/alpha)`, so the
/// series diverges exactly when `s <= alpha`, the boundary case by
/// comparison with the harmonic series. Monomials `floor(k^e)` diverge
/// exactly when `s e <= 1`. Linear rules always diverge for `s <= 1`,
/// and towers and geometric rules always converge.
pub fn classify_divergence(rule: &DigitRule, s_exp: &BigRational) -> Verdict {
    if s_exp <= &BigRational::zero() || s_exp > &BigRational::one() || rule.validate().is_err() {
        return Verdict::Unknown;
    }
    let by = |divergent: bool| {
        if divergent {
            Verdict::Divergent
        } else {
            Verdict::Convergent
        }
    };
    match rule {
        DigitRule::PowerFloor { alpha, .. } => by(s_exp <= alpha),
        DigitRule::BinaryPerturbed { alpha, .. } => by(s_exp <= alpha),
        DigitRule::Tower { .. } | DigitRule::Geometric { .. } => Verdict::Convergent,
        DigitRule::Linear { .. } => Verdict::Divergent,
        DigitRule::Monomial { exponent } => by(s_exp * exponent <= BigRational::one()),
        DigitRule::Custom(_) => Verdict::Unknown,
    }
}

/// A partial sum of `sum_k 1/s_k^s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiPartial {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub s: BigRational,
    pub n_terms: u64,
    /// Exact when every term is an exact root and the sum stayed small;
    /// otherwise outward rounded to `2^-frac_bits` per term.
    pub value: Enclosure,
    pub divergence_verdict: Verdict,
}

/// Terms at most this many are summed exactly when every root is exact.
const EXACT_TERMS: u64 = 2048;

/// Running enclosure of `sum_{k <= n} 1/s_k^s`.
struct PsiAccumulator<'a> {
    seq: &'a PierceSeq,
    p: u32,
    q: u32,
    frac_bits: u32,
    k: u64,
    exact: Option<BigRational>,
    lo: u128,
    hi: u128,
    done: bool,
}

impl<'a> PsiAccumulator<'a> {
    fn new(seq: &'a PierceSeq, s_exp: &BigRational, frac_bits: u32) -> Result<Self> {
        if s_exp <= &BigRational::zero() || s_exp > &BigRational::one() {
            return Err(Error::domain(format!("s must lie in (0, 1], got {s_exp}")));
        }
        // s = q/p, so s_k^s = (s_k^q)^(1/p).
        let (q, p) = small_parts(s_exp, "s")?;
        Ok(PsiAccumulator {
            seq,
            p,
            q,
            frac_bits: frac_bits.min(64),
            k: 0,
            exact: Some(BigRational::zero()),
            lo: 0,
            hi: 0,
            done: false,
        })
    }

    /// Adds the next term; returns false once the sequence has stopped.
    fn step(&mut self) -> bool {
        if self.done {
            return false;
        }
        let k = self.k + 1;
        let d = match self.seq.term(k).as_finite() {
            Some(d) => d.clone(),
            None => {
                self.done = true;
                return false;
            }
        };
        self.k = k;
        let lower_root = floor_root_power(&d, self.p, self.q);
        let exact_root = self.p == 1 || Pow::pow(&lower_root, self.p) == Pow::pow(&d, self.q);
        // term * 2^F = (2^(F p) / s_k^q)^(1/p), bracketed by integer roots of
        // the floor and ceiling of the inner quotient.
        let scaled = BigUint::one() << (self.frac_bits * self.p) as usize;
        let power = Pow::pow(&d, self.q);
        let (quot, rem) = scaled.div_rem(&power);
        let t_lo = integer_root(&quot, self.p);
        let t_hi = if rem.is_zero() {
            ceil_root_power(&quot, self.p, 1)
        } else {
            ceil_root_power(&(quot + 1u32), self.p, 1)
        };
        self.lo += t_lo.to_u128().expect("term bounded by 2^F");
        self.hi += t_hi.to_u128().expect("term bounded by 2^F");
        if let Some(sum) = self.exact.as_mut() {
            if exact_root && k <= EXACT_TERMS {
                *sum += BigRational::new(BigInt::one(), BigInt::from(lower_root));
            } else {
                self.exact = None;
            }
        }
        true
    }

    fn lower(&self) -> BigRational {
        match &self.exact {
            Some(x) => x.clone(),
            None => BigRational::new(BigInt::from(self.lo), BigInt::one() << self.frac_bits as usize),
        }
    }

    fn value(&self) -> Enclosure {
        match &self.exact {
            Some(x) => Enclosure::point(x.clone()),
            None => {
                let den = BigInt::one() << self.frac_bits as usize;
                Enclosure::new(
                    BigRational::new(BigInt::from(self.lo), den.clone()),
                    BigRational::new(BigInt::from(self.hi), den),
                )
            }
        }
    }
}

/// `sum_{k <= n_terms} 1/s_k^s` as an enclosure, with the family verdict.
pub fn psi_s_partial(seq: &PierceSeq, s_exp: &BigRational, n_terms: u64) -> Result<PsiPartial> {
    let mut acc = PsiAccumulator::new(seq, s_exp, LOG_FRAC_BITS)?;
    while acc.k < n_terms && acc.step() {}
    let verdict = match seq {
        PierceSeq::Finite(_) => Verdict::Convergent,
        PierceSeq::Infinite(rule) => classify_divergence(rule, s_exp),
    };
    Ok(PsiPartial {
        s: s_exp.clone(),
        n_terms,
        value: acc.value(),
        divergence_verdict: verdict,
    })
}

/// The first `n <= max_terms` whose partial sum certainly exceeds `bound`.
pub fn psi_s_first_exceeding(
    seq: &PierceSeq,
    s_exp: &BigRational,
    bound: &BigRational,
    max_terms: u64,
) -> Result<Option<u64>> {
    let mut acc = PsiAccumulator::new(seq, s_exp, LOG_FRAC_BITS)?;
    while acc.k < max_terms && acc.step() {
        if &acc.lower() > bound {
            return Ok(Some(acc.k));
        }
    }
    Ok(None)
}
