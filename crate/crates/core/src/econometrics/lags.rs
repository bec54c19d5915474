use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Panel;
use crate::{Error, Result};

pub const DEFAULT_WEAK_INSTRUMENT_F: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementError {
    /// `1 − β_OLS/β_IV`.
    pub estimate: f64,
    pub beta_ols: f64,
    pub beta_iv: f64,
    pub first_stage_f: f64,
    /// First-stage F below the configured floor.
    pub weak_instrument: bool,
    pub n: usize,
}

fn cov(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum()
}

/// Share of a persistent field's variance that is measurement noise,
/// comparing the OLS persistence of `x_t` on `x_{t−1}` with the IV
/// estimate that instruments `x_{t−1}` by `x_{t−2}`. Lags use the panel's
/// period order, so a gap in a firm's history breaks its chain.
pub fn measurement_error(panel: &Panel, field: &str, weak_f_floor: f64) -> Result<MeasurementError> {
    let col = panel.field(field)?;
    let periods = panel.periods();
    let position: BTreeMap<&str, usize> = periods.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let index = panel.index();
    let (mut y, mut x, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for (r, value) in col.iter().enumerate() {
        let Some(v) = value else { continue };
        let p = position[panel.time_ids()[r].as_str()];
        if p < 2 {
            continue;
        }
        let firm = panel.firm_ids()[r].as_str();
        let lag = |k: usize| index.get(&(firm, periods[p - k].as_str())).and_then(|&i| col[i]);
        if let (Some(l1), Some(l2)) = (lag(1), lag(2)) {
            y.push(*v);
            x.push(l1);
            z.push(l2);
        }
    }
    let n = y.len();
    if n < 3 {
        return Err(Error::InsufficientLags);
    }
    let sxx = cov(&x, &x);
    let szz = cov(&z, &z);
    if sxx == 0.0 || szz == 0.0 {
        return Err(Error::RankDeficient(String::from(field)));
    }
    let sxz = cov(&x, &z);
    let beta_ols = cov(&y, &x) / sxx;
    let beta_iv = cov(&y, &z) / sxz;
    let r2 = sxz * sxz / (sxx * szz);
    let first_stage_f = if r2 < 1.0 { r2 / (1.0 - r2) * (n as f64 - 2.0) } else { f64::INFINITY };
    Ok(MeasurementError {
        estimate: 1.0 - beta_ols / beta_iv,
        beta_ols,
        beta_iv,
        first_stage_f,
        weak_instrument: !(first_stage_f >= weak_f_floor),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_ar1_without_noise() {
        // x_t = 0.5·x_{t−1} exactly for every firm.
        let (mut f, mut t, mut ind, mut v) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for firm in 0..6 {
            let mut x = 1.0 + firm as f64;
            for year in 0..5 {
                f.push(alloc::format!("f{firm}"));
                t.push(alloc::format!("{}", 2010 + year));
                ind.push(String::from("i"));
                v.push(Some(x));
                x *= 0.5;
            }
        }
        let mut p = Panel::new(f, t, ind).unwrap();
        p.add_field("bloat", v).unwrap();
        let m = measurement_error(&p, "bloat", DEFAULT_WEAK_INSTRUMENT_F).unwrap();
        assert!((m.beta_ols - 0.5).abs() < 1e-12 && (m.beta_iv - 0.5).abs() < 1e-12);
        assert!(m.estimate.abs() < 1e-12);
        assert_eq!(m.n, 18);
    }

    #[test]
    fn too_short_history() {
        let mut p = Panel::new(vec![String::from("a"), String::from("a")], vec![String::from("1"), String::from("2")], vec![String::from("i"); 2]).unwrap();
        p.add_field("bloat", vec![Some(1.0), Some(2.0)]).unwrap();
        assert_eq!(measurement_error(&p, "bloat", 10.0), Err(Error::InsufficientLags));
    }
}
