use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTrend {
    pub intercept: f64,
    pub slope: f64,
    /// Heteroskedasticity-robust (HC1) standard error of the slope.
    pub robust_se: f64,
    /// `None` when the residuals are all zero.
    pub robust_t: Option<f64>,
    pub n: usize,
}

/// Linear trend in yearly t-statistics, `t = γ₀ + γ₁·year`.
pub fn t_trend(points: &[(f64, f64)]) -> Result<TTrend> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewYears(n));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::RankDeficient(alloc::string::String::from("year")));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let meat: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - intercept - slope * x;
            (x - mx) * (x - mx) * e * e
        })
        .sum();
    let robust_se = libm::sqrt(nf / (nf - 2.0) * meat) / sxx;
    let robust_t = (robust_se > 0.0).then(|| slope / robust_se);
    Ok(TTrend { intercept, slope, robust_se, robust_t, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_and_constant() {
        let line: [(f64, f64); 4] = [(2001.0, 1.5), (2002.0, 2.0), (2003.0, 2.5), (2004.0, 3.0)];
        let t = t_trend(&line).unwrap();
        assert!((t.slope - 0.5).abs() < 1e-12);
        assert_eq!(t.robust_t, None);
        let flat = t_trend(&[(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(t_trend(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::TooFewYears(2)));
    }
}
