use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ols::{complete_rows, fe_keys, Absorber};
use super::{FixedEffect, Panel};
use crate::linalg::dot;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalShare {
    pub label: String,
    /// Percent of total variation.
    pub share: f64,
}

fn absorbed_r2(panel: &Panel, rows: &[usize], y: &[f64], fes: &[FixedEffect]) -> Result<(f64, Vec<f64>)> {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let labels: Vec<&str> = fes.iter().map(FixedEffect::as_str).collect();
    let mut resid = y.to_vec();
    if !fes.is_empty() {
        Absorber::new(&labels, &fe_keys(panel, fes, rows)).demean(&mut resid)?;
    } else {
        resid.iter_mut().for_each(|v| *v -= mean);
    }
    let r2 = if tss > 0.0 { 1.0 - dot(&resid, &resid) / tss } else { 0.0 };
    Ok((r2, resid))
}

/// Shares of the dependent's variation explained by each successive
/// fixed-effect set, with the unexplained remainder reported as the
/// implied firm-level share. Shares sum to 100.
pub fn incremental_r2(panel: &Panel, dependent: &str, sequence: &[Vec<FixedEffect>]) -> Result<Vec<IncrementalShare>> {
    let col = panel.field(dependent)?;
    let rows = complete_rows(&[col], panel.len());
    if rows.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!("{} usable rows of {dependent}", rows.len())));
    }
    let y: Vec<f64> = rows.iter().filter_map(|&r| col[r]).collect();
    let mut out = Vec::with_capacity(sequence.len() + 1);
    let mut previous = 0.0;
    let mut prior_set: &[FixedEffect] = &[];
    for set in sequence {
        let (r2, _) = absorbed_r2(panel, &rows, &y, set)?;
        let added: Vec<&str> = set.iter().filter(|f| !prior_set.contains(f)).map(FixedEffect::as_str).collect();
        out.push(IncrementalShare { label: added.join("+"), share: r2 - previous });
        previous = r2;
        prior_set = set;
    }
    out.push(IncrementalShare { label: String::from("implied_firm"), share: 1.0 - previous });
    let total: f64 = out.iter().map(|s| s.share).sum();
    for s in out.iter_mut() {
        s.share *= 100.0 / total;
    }
    Ok(out)
}

/// R² of firm fixed effects on the dependent after removing
/// time×industry means.
pub fn firm_fe_fraction(panel: &Panel, dependent: &str) -> Result<f64> {
    let col = panel.field(dependent)?;
    let rows = complete_rows(&[col], panel.len());
    if rows.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!("{} usable rows of {dependent}", rows.len())));
    }
    let y: Vec<f64> = rows.iter().filter_map(|&r| col[r]).collect();
    let (_, resid) = absorbed_r2(panel, &rows, &y, &[FixedEffect::TimeIndustry])?;
    let (r2, _) = absorbed_r2(panel, &rows, &resid, &[FixedEffect::Firm])?;
    Ok(r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn panel_with(y: impl Fn(usize, usize, usize) -> f64) -> Panel {
        let (mut f, mut t, mut ind, mut v) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for firm in 0..12 {
            for year in 0..5 {
                f.push(alloc::format!("f{firm}"));
                t.push(alloc::format!("{}", 2000 + year));
                ind.push(alloc::format!("i{}", firm % 3));
                v.push(Some(y(firm, year, firm % 3)));
            }
        }
        let mut p = Panel::new(f, t, ind).unwrap();
        p.add_field("y", v).unwrap();
        p
    }

    fn sequence() -> Vec<Vec<FixedEffect>> {
        use FixedEffect::*;
        vec![vec![Time], vec![Time, Industry], vec![Time, Industry, TimeIndustry]]
    }

    #[test]
    fn time_only_variation() {
        let p = panel_with(|_, year, _| (year * year) as f64);
        let s = incremental_r2(&p, "y", &sequence()).unwrap();
        assert_eq!(s.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(), ["time", "industry", "time_industry", "implied_firm"]);
        assert!((s[0].share - 100.0).abs() < 1e-9);
        assert!(s[1..].iter().all(|x| x.share.abs() < 1e-9));
        assert!((s.iter().map(|x| x.share).sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn firm_variation_lands_in_the_remainder() {
        let p = panel_with(|firm, _, _| ((firm * 7) % 5) as f64);
        let s = incremental_r2(&p, "y", &sequence()).unwrap();
        assert!(s[3].share > 50.0);
        assert!((firm_fe_fraction(&p, "y").unwrap() - 1.0).abs() < 1e-9);
    }
}
