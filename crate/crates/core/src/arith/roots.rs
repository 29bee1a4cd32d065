use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

/// `floor(n^(1/k))` by integer Newton iteration from above.
pub fn integer_root(n: &BigUint, k: u32) -> BigUint {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || n.is_zero() || n.is_one() {
        return n.clone();
    }
    if let Some(small) = u128_of(n) {
        return BigUint::from(integer_root_u128(small, k));
    }
    let k_big = BigUint::from(k);
    let km1 = BigUint::from(k - 1);
    // 2^ceil(bits/k) is an upper bound for the root.
    let mut x = BigUint::one() << n.bits().div_ceil(k as u64) as usize;
    loop {
        let y = (&km1 * &x + n / Pow::pow(&x, k - 1)) / &k_big;
        if y >= x {
            return x;
        }
        x = y;
    }
}

fn u128_of(n: &BigUint) -> Option<u128> {
    if n.bits() <= 128 {
        let digits = n.to_u64_digits();
        Some(digits.iter().rev().fold(0u128, |acc, &d| (acc << 64) | d as u128))
    } else {
        None
    }
}

fn integer_root_u128(n: u128, k: u32) -> u128 {
    let bits = 128 - n.leading_zeros();
    let mut x: u128 = 1u128 << bits.div_ceil(k).min(127);
    loop {
        // x^(k-1) <= n here whenever it matters; saturate otherwise.
        let p = checked_pow(x, k - 1);
        let quotient = match p {
            Some(p) if p > 0 => n / p,
            _ => 0,
        };
        let y = ((k as u128 - 1) * x + quotient) / k as u128;
        if y >= x {
            return x;
        }
        x = y;
    }
}

fn checked_pow(mut base: u128, mut exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.checked_mul(base)?;
        }
        exp >>= 1;
        if exp > 0 {
            base = base.checked_mul(base)?;
        }
    }
    Some(acc)
}

/// `floor(n^(q/p))`, exactly, as the integer `p`-th root of `n^q`.
pub fn floor_root_power(n: &BigUint, p: u32, q: u32) -> BigUint {
    assert!(p >= 1 && q >= 1, "exponent parts must be positive");
    integer_root(&Pow::pow(n, q), p)
}

/// `ceil(n^(q/p))`: the smallest integer `m` with `m^p >= n^q`.
pub fn ceil_root_power(n: &BigUint, p: u32, q: u32) -> BigUint {
    let target = Pow::pow(n, q);
    let m = integer_root(&target, p);
    if Pow::pow(&m, p) == target {
        m
    } else {
        m + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bisection over `[0, n^q]`; independent of the Newton path.
    fn bisection_floor_root_power(n: u64, p: u32, q: u32) -> BigUint {
        let target = Pow::pow(&BigUint::from(n), q);
        let (mut lo, mut hi) = (BigUint::zero(), target.clone() + 1u32);
        while &hi - &lo > BigUint::one() {
            let mid = (&lo + &hi) >> 1usize;
            if Pow::pow(&mid, p) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn examples_against_bisection() {
        for (n, p, q, expected) in [(3u64, 1u32, 2u32, 9u32), (5, 2, 1, 2), (10, 3, 2, 4)] {
            assert_eq!(bisection_floor_root_power(n, p, q), BigUint::from(expected));
            assert_eq!(floor_root_power(&BigUint::from(n), p, q), BigUint::from(expected));
        }
    }

    #[test]
    fn big_roots() {
        let n = Pow::pow(&BigUint::from(10u32), 60u32) + 12345u32;
        let r = integer_root(&n, 3);
        assert_eq!(r, Pow::pow(&BigUint::from(10u32), 20u32));
        let exact = Pow::pow(&BigUint::from(987654321u64), 7u32);
        assert_eq!(integer_root(&exact, 7), BigUint::from(987654321u64));
        assert_eq!(integer_root(&(exact - 1u32), 7), BigUint::from(987654320u64));
    }

    #[test]
    fn ceil_root_power_exact_and_inexact() {
        assert_eq!(ceil_root_power(&BigUint::from(4u32), 2, 1), BigUint::from(2u32));
        assert_eq!(ceil_root_power(&BigUint::from(5u32), 2, 1), BigUint::from(3u32));
        assert_eq!(ceil_root_power(&BigUint::from(2u32), 1, 3), BigUint::from(8u32));
    }

    proptest! {
        #[test]
        fn floor_root_power_brackets(n in 1u64..5_000_000, p in 1u32..6, q in 1u32..6) {
            let m = floor_root_power(&BigUint::from(n), p, q);
            let target = Pow::pow(&BigUint::from(n), q);
            prop_assert!(Pow::pow(&m, p) <= target);
            prop_assert!(Pow::pow(&(m + 1u32), p) > target);
        }

        #[test]
        fn newton_matches_bisection(n in 1u64..20_000, p in 1u32..5, q in 1u32..4) {
            prop_assert_eq!(floor_root_power(&BigUint::from(n), p, q), bisection_floor_root_power(n, p, q));
        }
    }
}
