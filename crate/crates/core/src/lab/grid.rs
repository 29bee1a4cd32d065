use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{BigRational, RatInterval};
use crate::constructions::witness_in_interval;
use crate::digits::DigitPrefix;
use crate::error::{Error, Result};
use crate::DEFAULT_PRECISION_BITS;

/// Deepest dyadic grid accepted by [`density_grid_witness`].
pub const MAX_GRID_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub index: u64,
    pub cell: RatInterval,
    pub prefix: DigitPrefix,
    pub family: &'static str,
    pub enclosure: RatInterval,
    /// The enclosure lies inside the cell.
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridReport {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub alpha: BigRational,
    pub depth: u32,
    pub attempted: u64,
    pub witnessed: u64,
    pub cells: Vec<GridCell>,
}

/// Places a witness of exponent `alpha` in every dyadic cell of width
/// `2^-depth`.
pub fn density_grid_witness(alpha: &BigRational, depth: u32) -> Result<GridReport> {
    if depth > MAX_GRID_DEPTH {
        return Err(Error::GuardExceeded {
            what: "grid depth",
            value: depth.to_string(),
            limit: MAX_GRID_DEPTH.to_string(),
        });
    }
    let n = 1u64 << depth;
    let den = BigInt::from(n);
    let cells: Vec<GridCell> = (0..n)
        .into_par_iter()
        .map(|m| {
            let cell = RatInterval::new(
                BigRational::new(BigInt::from(m), den.clone()),
                BigRational::new(BigInt::from(m + 1), den.clone()),
            )?;
            let w = witness_in_interval(&cell, alpha, DEFAULT_PRECISION_BITS)?;
            Ok(GridCell {
                index: m,
                inside: cell.contains_interval(&w.enclosure),
                cell,
                prefix: w.cylinder.sigma,
                family: w.rule.family(),
                enclosure: w.enclosure,
            })
        })
        .collect::<Result<_>>()?;
    let witnessed = cells.iter().filter(|c| c.inside).count() as u64;
    Ok(GridReport {
        alpha: alpha.clone(),
        depth,
        attempted: n,
        witnessed,
        cells,
    })
}
