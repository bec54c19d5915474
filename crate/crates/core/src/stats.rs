//! Small descriptive statistics shared across modules.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Variance with divisor `n - ddof`.
pub fn variance(xs: &[f64], ddof: usize) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() <= ddof {
        return None;
    }
    Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - ddof) as f64)
}

pub fn std_dev(xs: &[f64], ddof: usize) -> Option<f64> {
    variance(xs, ddof).map(libm::sqrt)
}

/// Linear-interpolation percentile of already-sorted data (`q` in [0,1]):
/// position `h = (n-1)q`, value `x[⌊h⌋] + (h-⌊h⌋)(x[⌊h⌋+1] - x[⌊h⌋])`.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::AllMissing);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(alloc::format!("percentile {q} outside [0,1]")));
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn percentile(xs: &[f64], q: f64) -> Result<f64> {
    let mut sorted: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    percentile_sorted(&sorted, q)
}

pub fn median(xs: &[f64]) -> Result<f64> {
    percentile(xs, 0.5)
}

/// Count, mean, sample standard deviation and quartiles.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Describe {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
}

pub fn describe(xs: &[f64]) -> Result<Describe> {
    let mut sorted: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return Err(Error::AllMissing);
    }
    Ok(Describe {
        n: sorted.len(),
        mean: mean(&sorted).unwrap_or(f64::NAN),
        std: std_dev(&sorted, 1).unwrap_or(0.0),
        p25: percentile_sorted(&sorted, 0.25)?,
        p50: percentile_sorted(&sorted, 0.5)?,
        p75: percentile_sorted(&sorted, 0.75)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&x, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&x, 1.0).unwrap(), 4.0);
        assert!((percentile(&x, 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert!((percentile(&x, 0.25).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(percentile(&[], 0.5), Err(Error::AllMissing));
    }

    #[test]
    fn moments() {
        let x = [0.70, 0.71];
        assert!((mean(&x).unwrap() - 0.705).abs() < 1e-15);
        assert!((std_dev(&x, 0).unwrap() - 0.005).abs() < 1e-12);
        assert_eq!(variance(&[1.0], 1), None);
    }
}
