//! Exact arithmetic for Pierce expansions.
//!
//! Digits of rationals and of rational intervals, the evaluation map on
//! digit sequences, fundamental intervals, convergence exponents, rule
//! families with certified exponents, and covering and sampling experiments.

pub mod arith;
pub mod constructions;
pub mod digits;
pub mod error;
pub mod exponent;
pub mod lab;
pub mod sequence;
pub mod serde_util;

pub use arith::{floor_reciprocal, floor_root_power, parse_rational, BigRational, Enclosure, ExtNat, RatInterval};
pub use constructions::{
    build_binary_family, build_divergent_family, build_sigma_alpha, ivp_witness, witness_in_interval, CustomRule,
    DigitRule, Witness,
};
pub use digits::{
    digit_step, digits_rational, partial_sums, safe_digits, shift_orbit, DigitPrefix, SafeDigitsResult, SafeStatus,
};
pub use error::{Error, Result};
pub use exponent::{
    classify_divergence, lambda_certified, lambda_star_truncated, lambda_truncated, psi_n, psi_s_partial,
    LambdaEstimate, PsiPartial, Verdict,
};
pub use sequence::{
    cylinder_contains, dual_representation, fundamental_interval, locate_cylinder, phi_eval, rho_metric, FundInterval,
    PhiValue, PierceSeq,
};

/// Default enclosure precision in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 64;
