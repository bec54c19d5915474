use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::stats::{mean, median};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consensus {
    #[default]
    Median,
    Mean,
}

/// Standardized unexpected earnings, `(actual − consensus)/price`. `None`
/// when fewer than three analyst estimates are available.
pub fn sue(actual: f64, estimates: &[f64], price: f64, consensus: Consensus) -> Result<Option<f64>> {
    if !(price > 0.0) {
        return Err(Error::NonpositivePrice);
    }
    let estimates: Vec<f64> = estimates.iter().copied().filter(|e| e.is_finite()).collect();
    if estimates.len() < 3 {
        return Ok(None);
    }
    let c = match consensus {
        Consensus::Median => median(&estimates)?,
        Consensus::Mean => mean(&estimates).ok_or(Error::AllMissing)?,
    };
    Ok(Some((actual - c) / price))
}
