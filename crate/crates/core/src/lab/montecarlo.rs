//! Seeded sampling of digit statistics on dyadic enclosures.

use num_bigint::{BigInt, BigUint};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ln_bounds, BigRational, Enclosure, RatInterval, LOG_FRAC_BITS};
use crate::digits::{safe_digits, SafeStatus};
use crate::error::{Error, Result};
use crate::exponent::lambda_star_from_digits;

/// Generator recorded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng/seed_from_u64/stream=sample-index";

/// Depth at which the digit statistics are considered deep enough.
pub const DEEP_DEPTH: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McSample {
    pub index: u64,
    /// Number of digits shared by the whole enclosure.
    pub depth: usize,
    pub status: SafeStatus,
    #[serde(serialize_with = "crate::serde_util::opt_display")]
    pub last_digit: Option<BigUint>,
    /// Encloses `ln d_depth / depth`.
    pub log_ratio: Option<Enclosure>,
    /// Tail-window maximum of `psi_n` over the certified digits.
    pub lambda_window: Enclosure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthQuantiles {
    pub min: usize,
    pub q10: usize,
    pub q25: usize,
    pub median: usize,
    pub q75: usize,
    pub q90: usize,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub rng: &'static str,
    pub seed: u64,
    pub bits: u32,
    pub count: u64,
    pub samples: Vec<McSample>,
    /// Lower median of the lower and upper bounds of `ln d_n / n`.
    pub median_log_ratio: Option<Enclosure>,
    pub depth_quantiles: DepthQuantiles,
    /// Samples with depth at least [`DEEP_DEPTH`].
    pub deep_samples: u64,
    /// Samples whose window diagnostic is certainly at most 3/20.
    pub small_lambda_samples: u64,
}

/// The dyadic `p / 2^bits` drawn for sample `index`.
pub fn sample_numerator(bits: u32, seed: u64, index: u64) -> BigUint {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill_bytes(&mut bytes);
    BigUint::from_bytes_le(&bytes) >> (bytes.len() * 8 - bits as usize)
}

fn run_sample(bits: u32, seed: u64, index: u64) -> Result<McSample> {
    let p = sample_numerator(bits, seed, index);
    let den = BigInt::from(1) << bits as usize;
    let lo = BigRational::new(BigInt::from(p.clone()), den.clone());
    let hi = BigRational::new(BigInt::from(p + 1u32), den);
    let interval = RatInterval::new(lo, hi)?;
    let safe = safe_digits(&interval, bits as usize)?;
    let depth = safe.prefix.len();
    let status = safe.status;
    let last_digit = safe.prefix.last().cloned();
    let log_ratio = last_digit.as_ref().map(|d| {
        let inv = BigRational::new(1.into(), BigInt::from(depth));
        ln_bounds(d, LOG_FRAC_BITS).scale(&inv)
    });
    let lambda = lambda_star_from_digits(safe)?;
    Ok(McSample {
        index,
        depth,
        status,
        last_digit,
        log_ratio,
        lambda_window: lambda.sup_value,
    })
}

fn lower_median(mut xs: Vec<BigRational>) -> Option<BigRational> {
    if xs.is_empty() {
        return None;
    }
    xs.sort();
    Some(xs[(xs.len() - 1) / 2].clone())
}

fn quantile(sorted: &[usize], q_num: usize, q_den: usize) -> usize {
    sorted[(sorted.len() - 1) * q_num / q_den]
}

/// Draws `count` dyadic enclosures of width `2^-bits` and reports the
/// certified digit depth and digit growth of each. Samples run in parallel
/// and are merged by index, so the report depends only on the arguments.
pub fn mc_sample_digits(bits: u32, count: u64, seed: u64) -> Result<McReport> {
    if bits < 256 {
        return Err(Error::domain(format!("bits must be at least 256, got {bits}")));
    }
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    let samples: Vec<McSample> = (0..count)
        .into_par_iter()
        .map(|i| run_sample(bits, seed, i))
        .collect::<Result<_>>()?;

    let (los, his): (Vec<_>, Vec<_>) = samples
        .iter()
        .filter_map(|s| s.log_ratio.as_ref())
        .map(|e| (e.lo().clone(), e.hi().clone()))
        .unzip();
    let median_log_ratio = match (lower_median(los), lower_median(his)) {
        (Some(lo), Some(hi)) => Some(Enclosure::new(lo, hi)),
        _ => None,
    };
    let mut depths: Vec<usize> = samples.iter().map(|s| s.depth).collect();
    depths.sort_unstable();
    let depth_quantiles = DepthQuantiles {
        min: depths[0],
        q10: quantile(&depths, 1, 10),
        q25: quantile(&depths, 1, 4),
        median: quantile(&depths, 1, 2),
        q75: quantile(&depths, 3, 4),
        q90: quantile(&depths, 9, 10),
        max: *depths.last().unwrap(),
    };
    let cap = BigRational::new(3.into(), 20.into());
    let deep_samples = samples.iter().filter(|s| s.depth >= DEEP_DEPTH).count() as u64;
    let small_lambda_samples = samples.iter().filter(|s| s.lambda_window.hi() <= &cap).count() as u64;
    Ok(McReport {
        rng: RNG_ALGORITHM,
        seed,
        bits,
        count,
        samples,
        median_log_ratio,
        depth_quantiles,
        deep_samples,
        small_lambda_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::digits_rational;

    #[test]
    fn sampling_is_deterministic_and_stream_separated() {
        let a = mc_sample_digits(256, 3, 7).unwrap();
        let b = mc_sample_digits(256, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(sample_numerator(256, 7, 0), sample_numerator(256, 7, 1));
        assert_ne!(sample_numerator(256, 7, 0), sample_numerator(256, 8, 0));
        assert!(sample_numerator(300, 1, 0).bits() <= 300);
    }

    #[test]
    fn certified_digits_are_shared_by_both_endpoints() {
        let bits = 256;
        let rep = mc_sample_digits(bits, 4, 11).unwrap();
        for s in &rep.samples {
            let p = sample_numerator(bits, 11, s.index);
            let den = BigInt::from(1) << bits as usize;
            for num in [BigInt::from(p.clone()), BigInt::from(p + 1u32)] {
                let d = digits_rational(&BigRational::new(num, den.clone())).unwrap();
                assert!(d.len() >= s.depth);
                assert_eq!(d.digits().get(s.depth.wrapping_sub(1)), s.last_digit.as_ref());
            }
        }
    }

    #[test]
    fn small_inputs_are_rejected() {
        assert!(mc_sample_digits(128, 1, 0).is_err());
        assert!(mc_sample_digits(256, 0, 0).is_err());
    }
}
