//! Desk-scale experiments: covering layers and series, seeded digit
//! sampling, and witness sweeps over dyadic grids.

pub mod cover;
pub mod grid;
pub mod montecarlo;

pub use cover::{
    covering_sum, covering_sum_with_precision, enumerate_lambda_k, hdim_upper_refined, lambda_k_bound, CoverParams,
    CoverReport, CoverVerdict, LambdaCount,
};
pub use grid::{density_grid_witness, GridCell, GridReport};
pub use montecarlo::{mc_sample_digits, McReport, McSample, RNG_ALGORITHM};
