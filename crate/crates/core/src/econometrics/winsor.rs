use alloc::vec::Vec;

use crate::stats::percentile_sorted;
use crate::{Error, Result};

/// The `lower` and `upper` percentiles (fractions in [0,1], linear
/// interpolation between order statistics) of the finite values.
pub fn winsor_bounds(values: &[f64], lower: f64, upper: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower > upper {
        return Err(Error::InvalidParameter(alloc::format!("bad winsor bounds {lower}, {upper}")));
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Err(Error::AllMissing);
    }
    sorted.sort_by(f64::total_cmp);
    Ok((percentile_sorted(&sorted, lower)?, percentile_sorted(&sorted, upper)?))
}

/// Clamps values to their `lower` and `upper` percentiles. Non-finite
/// values pass through untouched.
pub fn winsorize(values: &[f64], lower: f64, upper: f64) -> Result<Vec<f64>> {
    let (lo, hi) = winsor_bounds(values, lower, upper)?;
    Ok(values.iter().map(|v| if v.is_finite() { v.clamp(lo, hi) } else { *v }).collect())
}

/// [`winsorize`] over a column with missing values, which stay missing.
pub fn winsorize_column(values: &[Option<f64>], lower: f64, upper: f64) -> Result<Vec<Option<f64>>> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let clamped = winsorize(&present, lower, upper)?;
    let mut it = clamped.into_iter();
    Ok(values.iter().map(|v| v.and_then(|_| it.next())).collect())
}
