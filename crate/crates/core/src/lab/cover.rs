//! Covering layers for the upper bound on the dimension of level sets.
//!
//! `Lambda_k` is the set of strictly increasing `k`-tuples with
//! `s_j >= j^(1/(beta+eps))` for `N <= j <= k` and `s_k <= k^(1/(alpha-eps))`.
//! The covering series has terms `a_k = k^(k r) / (k!)^c` with
//! `r = 1/(alpha-eps)` and `c = s/(beta+eps) + 1`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{
    ceil_root_power, exp_bounds, floor_root_power, ln_bounds, round_relative, small_parts, BigRational, Enclosure,
    LOG_FRAC_BITS,
};
use crate::error::{Error, Result};
use crate::DEFAULT_PRECISION_BITS;

/// Largest digit bound the counting recursion accepts.
pub const MAX_DIGIT_BOUND: u64 = 10_000_000;
/// Largest predicted count that may be listed explicitly.
pub const MAX_LISTING: u64 = 10_000_000;

/// Parameters of one covering family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverParams {
    pub n: u64,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub alpha: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub beta: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub s: BigRational,
    pub k_max: u64,
}

impl CoverParams {
    pub fn new(
        n: u64,
        alpha: BigRational,
        beta: BigRational,
        epsilon: BigRational,
        s: BigRational,
        k_max: u64,
    ) -> Result<Self> {
        let p = CoverParams {
            n,
            alpha,
            beta,
            epsilon,
            s,
            k_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if self.n < 1 {
            return Err(Error::domain("N must be at least 1"));
        }
        if self.alpha <= zero || self.alpha > one || self.beta > one || self.alpha > self.beta {
            return Err(Error::domain(format!(
                "need 0 < alpha <= beta <= 1, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if self.epsilon <= zero || self.epsilon >= self.alpha {
            return Err(Error::domain(format!(
                "need 0 < eps < alpha, got eps = {}",
                self.epsilon
            )));
        }
        if self.s <= zero {
            return Err(Error::domain(format!("s must be positive, got {}", self.s)));
        }
        if self.k_max < self.n {
            return Err(Error::domain(format!("k_max = {} is below N = {}", self.k_max, self.n)));
        }
        Ok(())
    }

    /// `r = 1/(alpha - eps)`.
    pub fn upper_exponent(&self) -> BigRational {
        (&self.alpha - &self.epsilon).recip()
    }

    /// `1/(beta + eps)`.
    pub fn lower_exponent(&self) -> BigRational {
        (&self.beta + &self.epsilon).recip()
    }

    /// `c = s/(beta + eps) + 1`.
    pub fn factorial_exponent(&self) -> BigRational {
        &self.s * self.lower_exponent() + BigRational::one()
    }

    /// `(beta + eps)(r - 1)`; the series converges for `s` above it.
    pub fn threshold(&self) -> BigRational {
        (&self.beta + &self.epsilon) * (self.upper_exponent() - BigRational::one())
    }
}

/// `floor(k^x)` for a positive rational `x`.
fn floor_pow(k: u64, x: &BigRational) -> Result<BigUint> {
    let (a, b) = small_parts(x, "exponent")?;
    Ok(floor_root_power(&BigUint::from(k), b, a))
}

/// `ceil(k^x)` for a positive rational `x`.
fn ceil_pow(k: u64, x: &BigRational) -> Result<BigUint> {
    let (a, b) = small_parts(x, "exponent")?;
    Ok(ceil_root_power(&BigUint::from(k), b, a))
}

/// Size of `Lambda_k`, with the tuples themselves when requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaCount {
    pub k: u64,
    /// `floor(k^r)`.
    pub digit_bound: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub count: BigUint,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub binomial_bound: BigUint,
    pub listing: Option<Vec<Vec<u64>>>,
}

fn guard(what: &'static str, value: impl ToString, limit: impl ToString) -> Error {
    Error::GuardExceeded {
        what,
        value: value.to_string(),
        limit: limit.to_string(),
    }
}

/// Counts `Lambda_k` exactly and optionally lists it.
pub fn enumerate_lambda_k(p: &CoverParams, k: u64, list: bool) -> Result<LambdaCount> {
    p.validate()?;
    if k < p.n {
        return Err(Error::domain(format!("k = {k} is below N = {}", p.n)));
    }
    let upper = floor_pow(k, &p.upper_exponent())?;
    let binomial_bound = lambda_k_bound(p, k)?;
    let u = match upper.to_u64() {
        Some(u) if u <= MAX_DIGIT_BOUND => u,
        _ => return Err(guard("digit bound", &upper, MAX_DIGIT_BOUND)),
    };
    let lower_exp = p.lower_exponent();
    let lower: Vec<u64> = (1..=k)
        .map(|j| {
            if j >= p.n {
                ceil_pow(j, &lower_exp).map(|b| b.to_u64().unwrap_or(u64::MAX))
            } else {
                Ok(1)
            }
        })
        .collect::<Result<_>>()?;
    let count = count_tuples(&lower, u)?;
    let listing = if list {
        if binomial_bound > BigUint::from(MAX_LISTING) {
            return Err(guard("predicted count", &binomial_bound, MAX_LISTING));
        }
        let mut out = Vec::new();
        list_tuples(&lower, u, &mut Vec::new(), &mut out);
        Some(out)
    } else {
        None
    };
    Ok(LambdaCount {
        k,
        digit_bound: u,
        count: BigUint::from(count),
        binomial_bound,
        listing,
    })
}

/// Number of strictly increasing tuples with `lower[j] <= t_j <= upper`.
fn count_tuples(lower: &[u64], upper: u64) -> Result<u128> {
    if lower.is_empty() {
        return Ok(1);
    }
    let width = upper as usize + 1;
    // ending[v]: tuples of the current length whose last entry is v.
    let mut ending = vec![0u128; width];
    for v in lower[0].max(1)..=upper {
        ending[v as usize] = 1;
    }
    for &lo in &lower[1..] {
        let mut next = vec![0u128; width];
        let mut below = 0u128;
        for v in 1..width {
            if v as u64 >= lo {
                next[v] = below;
            }
            below = below
                .checked_add(ending[v])
                .ok_or_else(|| guard("tuple count", "overflow", u128::MAX))?;
        }
        ending = next;
    }
    ending
        .iter()
        .try_fold(0u128, |acc, &c| acc.checked_add(c))
        .ok_or_else(|| guard("tuple count", "overflow", u128::MAX))
}

fn list_tuples(lower: &[u64], upper: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let j = current.len();
    if j == lower.len() {
        out.push(current.clone());
        return;
    }
    let start = lower[j].max(current.last().map_or(1, |&v| v + 1));
    // Leave room for the remaining entries.
    let remaining = (lower.len() - j - 1) as u64;
    let stop = upper.saturating_sub(remaining);
    for v in start..=stop {
        current.push(v);
        list_tuples(lower, upper, current, out);
        current.pop();
    }
}

/// `C(floor(k^r), k)`, which dominates the size of `Lambda_k`.
pub fn lambda_k_bound(p: &CoverParams, k: u64) -> Result<BigUint> {
    if k < p.n {
        return Err(Error::domain(format!("k = {k} is below N = {}", p.n)));
    }
    let top = floor_pow(k, &p.upper_exponent())?;
    Ok(binomial(&top, k))
}

fn binomial(n: &BigUint, k: u64) -> BigUint {
    if n < &BigUint::from(k) {
        return BigUint::zero();
    }
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverVerdict {
    RatioVanishing,
    Inconclusive,
}

/// Terms, ratios and partial sums of the covering series for
/// `k = N..=k_max`, all as outward-rounded enclosures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub params: CoverParams,
    pub precision_bits: u32,
    /// Enclosures of `ln a_k`.
    pub log_terms: Vec<Enclosure>,
    pub terms: Vec<Enclosure>,
    /// `a_{k+1} / a_k` for `k = N..k_max-1`.
    pub ratios: Vec<Enclosure>,
    pub partial_sums: Vec<Enclosure>,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub threshold: BigRational,
    /// Index `k` where the tail window of ratios starts.
    pub tail_start: u64,
    /// Largest relative width `(hi - lo)/lo` over the terms.
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub max_relative_width: BigRational,
    pub verdict: CoverVerdict,
}

fn exp_enclosure(x: &Enclosure, prec: u32) -> Enclosure {
    let lo = exp_bounds(x.lo(), prec).lo().clone();
    let hi = exp_bounds(x.hi(), prec).hi().clone();
    Enclosure::new(round_relative(&lo, prec, false), round_relative(&hi, prec, true))
}

pub fn covering_sum(p: &CoverParams) -> Result<CoverReport> {
    covering_sum_with_precision(p, DEFAULT_PRECISION_BITS)
}

/// Evaluates the covering series in the log domain:
/// `ln a_k = k r ln k - c ln k!` and
/// `ln(a_{k+1}/a_k) = r((k+1) ln(k+1) - k ln k) - c ln(k+1)`.
pub fn covering_sum_with_precision(p: &CoverParams, precision_bits: u32) -> Result<CoverReport> {
    p.validate()?;
    let r = p.upper_exponent();
    let c = p.factorial_exponent();
    let ln = |k: u64| ln_bounds(&BigUint::from(k), LOG_FRAC_BITS);
    let int = |k: u64| BigRational::from_integer(BigInt::from(k));

    let mut ln_fact = Enclosure::point(BigRational::zero());
    let mut log_terms = Vec::new();
    let mut terms = Vec::new();
    let mut ratios = Vec::new();
    let mut partial_sums = Vec::new();
    let mut sum = Enclosure::point(BigRational::zero());
    let mut max_rel = BigRational::zero();
    for k in 1..=p.k_max {
        let ln_k = ln(k);
        ln_fact = &ln_fact + &ln_k;
        if k < p.n {
            continue;
        }
        let log_a = &ln_k.scale(&(int(k) * &r)) - &ln_fact.scale(&c);
        let a = exp_enclosure(&log_a, precision_bits);
        let rel = a.width() / a.lo();
        if rel > max_rel {
            max_rel = rel;
        }
        sum = &sum + &a;
        sum = Enclosure::new(
            round_relative(sum.lo(), precision_bits, false),
            round_relative(sum.hi(), precision_bits, true),
        );
        if k < p.k_max {
            let ln_next = ln(k + 1);
            let growth = &ln_next.scale(&int(k + 1)) - &ln_k.scale(&int(k));
            let log_ratio = &growth.scale(&r) - &ln_next.scale(&c);
            ratios.push(exp_enclosure(&log_ratio, precision_bits));
        }
        log_terms.push(log_a);
        terms.push(a);
        partial_sums.push(sum.clone());
    }

    let threshold = p.threshold();
    let tail_len = (ratios.len() / 4).max(2).min(ratios.len());
    let tail = &ratios[ratios.len() - tail_len..];
    let one = BigRational::one();
    let tail_ok =
        tail.len() >= 2 && tail.iter().all(|q| q.hi() < &one) && tail.windows(2).all(|w| w[1].hi() < w[0].lo());
    let verdict = if p.s > threshold && tail_ok {
        CoverVerdict::RatioVanishing
    } else {
        CoverVerdict::Inconclusive
    };
    Ok(CoverReport {
        params: p.clone(),
        precision_bits,
        log_terms,
        terms,
        ratios: ratios.clone(),
        partial_sums,
        threshold,
        tail_start: p.n + (ratios.len() - tail_len) as u64,
        max_relative_width: max_rel,
        verdict,
    })
}

/// `max_j a_{j+1}(1/a_j - 1)` over the partition
/// `a_j = alpha + j(beta - alpha)/n` of `[alpha, beta]`.
pub fn hdim_upper_refined(alpha: &BigRational, beta: &BigRational, n_parts: u64) -> Result<BigRational> {
    if alpha <= &BigRational::zero() || alpha > &BigRational::one() || beta < alpha {
        return Err(Error::domain(format!(
            "need 0 < alpha <= 1 and beta >= alpha, got {alpha}, {beta}"
        )));
    }
    if n_parts == 0 {
        return Err(Error::domain("n_parts must be at least 1"));
    }
    if n_parts > MAX_DIGIT_BOUND {
        return Err(guard("n_parts", n_parts, MAX_DIGIT_BOUND));
    }
    let step = (beta - alpha) / BigRational::from_integer(BigInt::from(n_parts));
    let mut best: Option<BigRational> = None;
    let mut a_j = alpha.clone();
    for _ in 0..n_parts {
        let a_next = &a_j + &step;
        let v = &a_next * (a_j.recip() - BigRational::one());
        if best.as_ref().is_none_or(|b| &v > b) {
            best = Some(v);
        }
        a_j = a_next;
    }
    Ok(best.expect("n_parts >= 1"))
}
