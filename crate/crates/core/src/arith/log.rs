//! Verified logarithm and exponential enclosures.
//!
//! `log2` of an exact integer is bracketed by the repeated-squaring bit
//! algorithm run twice on a 64-bit mantissa, once rounding down and once
//! rounding up. Each track preserves `bits + 2^-k * log2(m)` as a one-sided
//! bound, so the two results enclose the true value.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{round_down, round_relative, round_up, BigRational, Enclosure};

/// Default number of fractional bits carried by [`Log2Bounds`].
pub const LOG_FRAC_BITS: u32 = 64;

const ONE: u128 = 1 << 63;
const TWO: u128 = 1 << 64;

/// Fixed-point bounds on `log2(n)`: the true value lies in
/// `[lo / 2^frac_bits, hi / 2^frac_bits]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Log2Bounds {
    pub lo: u128,
    pub hi: u128,
    pub frac_bits: u32,
}

impl Log2Bounds {
    pub fn zero(frac_bits: u32) -> Self {
        Log2Bounds {
            lo: 0,
            hi: 0,
            frac_bits,
        }
    }

    /// Bounds on `e * log2(n)`.
    pub fn scale(&self, e: u64) -> Self {
        Log2Bounds {
            lo: self.lo.checked_mul(e as u128).expect("log2 bound overflow"),
            hi: self.hi.checked_mul(e as u128).expect("log2 bound overflow"),
            frac_bits: self.frac_bits,
        }
    }

    pub fn to_enclosure(&self) -> Enclosure {
        let den = BigInt::one() << self.frac_bits as usize;
        Enclosure::new(
            BigRational::new(BigInt::from(self.lo), den.clone()),
            BigRational::new(BigInt::from(self.hi), den),
        )
    }
}

/// Encloses `log2(n)` for `n >= 1` with `frac_bits <= 64` fractional bits.
pub fn log2_bounds(n: &BigUint, frac_bits: u32) -> Log2Bounds {
    assert!(!n.is_zero(), "log2 of zero");
    assert!(frac_bits <= 64, "at most 64 fractional bits are supported");
    let len = n.bits();
    let int = (len - 1) as u128;
    let (m_lo, m_hi) = if len <= 64 {
        let m = (n.to_u64().unwrap() as u128) << (64 - len);
        (m, m)
    } else {
        let shift = (len - 64) as usize;
        let top = (n >> shift).to_u64().unwrap() as u128;
        let exact = n.trailing_zeros().unwrap_or(0) >= shift as u64;
        (top, if exact { top } else { top + 1 })
    };
    let base = int << frac_bits;
    if m_lo == ONE && m_hi == ONE {
        return Log2Bounds {
            lo: base,
            hi: base,
            frac_bits,
        };
    }
    let lo = base + fraction_bits(m_lo, frac_bits, false);
    let hi = base + fraction_bits(m_hi, frac_bits, true);
    Log2Bounds { lo, hi, frac_bits }
}

/// Fractional part of `log2(m / 2^63)` in units of `2^-frac_bits`, rounded
/// down (`up = false`) or up.
fn fraction_bits(mut m: u128, frac_bits: u32, up: bool) -> u128 {
    let mut b: u128 = 0;
    for k in 0..frac_bits {
        if m >= TWO {
            // Only the upward track can land on exactly 2; the remaining
            // logarithm at this depth is then exactly one unit.
            debug_assert!(up && m == TWO);
            return (b + 1) << (frac_bits - k);
        }
        let sq = m * m;
        let shift = if sq >= 1 << 127 {
            b = (b << 1) | 1;
            64
        } else {
            b <<= 1;
            63
        };
        let rest = sq & ((1u128 << shift) - 1);
        m = (sq >> shift) + u128::from(up && rest != 0);
    }
    if up {
        b + 1
    } else {
        b
    }
}

const LN2_BITS: u32 = 192;

/// Rational enclosure of `ln 2` with 192-bit dyadic endpoints, from
/// `ln 2 = sum 1/(k 2^k)` and the tail bound `1/((K+1) 2^K)`.
pub fn ln2_bounds() -> &'static Enclosure {
    static LN2: OnceLock<Enclosure> = OnceLock::new();
    LN2.get_or_init(|| {
        let terms = 200u32;
        let mut sum = BigRational::zero();
        for k in 1..=terms {
            sum += BigRational::new(BigInt::one(), BigInt::from(k) << k as usize);
        }
        let tail = BigRational::new(BigInt::one(), BigInt::from(terms + 1) << terms as usize);
        Enclosure::new(round_down(&sum, LN2_BITS), round_up(&(sum + tail), LN2_BITS))
    })
}

/// Encloses the natural logarithm of `n >= 1`.
pub fn ln_bounds(n: &BigUint, frac_bits: u32) -> Enclosure {
    log2_bounds(n, frac_bits).to_enclosure().mul(ln2_bounds())
}

/// Encloses `exp(x)` for an exact rational `x`, with roughly `prec` bits
/// of relative accuracy.
pub fn exp_bounds(x: &BigRational, prec: u32) -> Enclosure {
    let work = prec + 16;
    let int = x.floor().to_integer();
    let frac = x - BigRational::from_integer(int.clone());
    let (f_lo, f_hi) = (round_down(&frac, work), round_up(&frac, work));
    let f_hi = f_hi.min(BigRational::one());
    let lo_frac = exp_unit(&f_lo, work, false);
    let hi_frac = exp_unit(&f_hi, work, true);

    let e = e_bounds(work);
    let m = int.magnitude().to_u64().expect("exponent too large for exp_bounds");
    let (pow_lo, pow_hi) = (pow_rounded(e.lo(), m, work, false), pow_rounded(e.hi(), m, work, true));
    let (scale_lo, scale_hi) = if int.is_negative() {
        (pow_hi.recip(), pow_lo.recip())
    } else {
        (pow_lo, pow_hi)
    };
    Enclosure::new(scale_lo * lo_frac, scale_hi * hi_frac)
}

fn e_bounds(work: u32) -> Enclosure {
    let one = BigRational::one();
    Enclosure::new(exp_unit(&one, work, false), exp_unit(&one, work, true))
}

/// Taylor bound for `exp(f)`, `0 <= f <= 1`, in fixed point with `work + 32`
/// fractional bits. Every term is rounded in the requested direction; the
/// tail after the last term `t` is at most `2t` because `f/(k+1) <= 1/2`.
fn exp_unit(f: &BigRational, work: u32, up: bool) -> BigRational {
    let w = work + 32;
    let scale = BigInt::one() << w as usize;
    let scaled = f * BigRational::from_integer(scale.clone());
    let f_fixed = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let cutoff = BigInt::one() << (w - work - 2) as usize;
    let mut sum = BigInt::zero();
    let mut term = scale.clone();
    let mut k = 0u32;
    while term > cutoff || k < 2 {
        sum += &term;
        k += 1;
        let den = BigInt::from(k) << w as usize;
        let prod = &term * &f_fixed;
        term = if up {
            -((-prod).div_floor(&den))
        } else {
            prod.div_floor(&den)
        };
    }
    if up {
        sum += &term * 2;
    }
    let x = BigRational::new(sum, scale);
    if up {
        round_up(&x, work)
    } else {
        round_down(&x, work)
    }
}

/// `base^m` for `base >= 1`, rounding each product relative to its size.
fn pow_rounded(base: &BigRational, mut m: u64, work: u32, up: bool) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let round = |x: BigRational| round_relative(&x, work + 8, up);
    while m > 0 {
        if m & 1 == 1 {
            acc = round(&acc * &b);
        }
        m >>= 1;
        if m > 0 {
            b = round(&b * &b);
        }
    }
    acc
}
