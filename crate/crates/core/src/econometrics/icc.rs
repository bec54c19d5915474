use alloc::string::String;

use crate::{Error, Result};

/// One-way random-effects ICC(1,1) for `subjects × trials` measurements:
/// `(MS_between − MS_within)/(MS_between + (k−1)·MS_within)`. A matrix with
/// no variation at all returns 1.
pub fn icc(matrix: &[alloc::vec::Vec<f64>]) -> Result<f64> {
    let n = matrix.len();
    let k = matrix.first().map_or(0, |r| r.len());
    if n < 2 || k < 2 {
        return Err(Error::InsufficientData(String::from("ICC needs at least two subjects and two trials")));
    }
    if matrix.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidParameter(String::from("every subject needs the same number of trials")));
    }
    if matrix.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(String::from("ICC input must be finite")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let grand = matrix.iter().flatten().sum::<f64>() / (nf * kf);
    let means: alloc::vec::Vec<f64> = matrix.iter().map(|r| r.iter().sum::<f64>() / kf).collect();
    let ss_between: f64 = means.iter().map(|m| kf * (m - grand) * (m - grand)).sum();
    let ss_within: f64 = matrix.iter().zip(&means).map(|(r, m)| r.iter().map(|x| (x - m) * (x - m)).sum::<f64>()).sum();
    let ms_between = ss_between / (nf - 1.0);
    let ms_within = ss_within / (nf * (kf - 1.0));
    let denom = ms_between + (kf - 1.0) * ms_within;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((ms_between - ms_within) / denom)
}
