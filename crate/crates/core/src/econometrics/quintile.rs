use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Panel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuintileTransition {
    /// `matrix[i][j]`: percent of firms in quintile `i` that are in
    /// quintile `j` next period. Rows without firms are all zero.
    pub matrix: [[f64; 5]; 5],
    pub counts: [[usize; 5]; 5],
    pub period_pairs: usize,
}

/// Quintile membership per firm within one period: ranks by value, ties
/// broken by firm id, quintile `⌊5·rank/n⌋`.
fn quintiles<'a>(mut obs: Vec<(&'a str, f64)>) -> BTreeMap<&'a str, usize> {
    obs.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let n = obs.len();
    obs.into_iter().enumerate().map(|(rank, (firm, _))| (firm, rank * 5 / n)).collect()
}

/// Pooled transition matrix between quintiles of `field` in adjacent
/// periods.
pub fn quintile_transition(panel: &Panel, field: &str) -> Result<QuintileTransition> {
    let col = panel.field(field)?;
    let periods = panel.periods();
    let mut by_period: BTreeMap<&str, Vec<(&str, f64)>> = periods.iter().map(|p| (p.as_str(), Vec::new())).collect();
    for (i, v) in col.iter().enumerate() {
        if let Some(v) = v {
            if let Some(list) = by_period.get_mut(panel.time_ids()[i].as_str()) {
                list.push((panel.firm_ids()[i].as_str(), *v));
            }
        }
    }
    let mut assigned = Vec::with_capacity(periods.len());
    for p in &periods {
        let obs = by_period.remove(p.as_str()).unwrap_or_default();
        if obs.len() < 5 {
            return Err(Error::TooFewFirms { period: String::from(p), firms: obs.len() });
        }
        assigned.push(quintiles(obs));
    }
    let mut counts = [[0usize; 5]; 5];
    for pair in assigned.windows(2) {
        for (firm, &q0) in &pair[0] {
            if let Some(&q1) = pair[1].get(firm) {
                counts[q0][q1] += 1;
            }
        }
    }
    let mut matrix = [[0.0; 5]; 5];
    for (row, c) in matrix.iter_mut().zip(&counts) {
        let total: usize = c.iter().sum();
        if total > 0 {
            for (m, &x) in row.iter_mut().zip(c) {
                *m = 100.0 * x as f64 / total as f64;
            }
        }
    }
    Ok(QuintileTransition { matrix, counts, period_pairs: periods.len().saturating_sub(1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(firms: usize, periods: usize, value: impl Fn(usize, usize) -> f64) -> Panel {
        let (mut f, mut t, mut ind, mut v) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for firm in 0..firms {
            for p in 0..periods {
                f.push(alloc::format!("f{firm:03}"));
                t.push(alloc::format!("{}", 2000 + p));
                ind.push(String::from("x"));
                v.push(Some(value(firm, p)));
            }
        }
        let mut panel = Panel::new(f, t, ind).unwrap();
        panel.add_field("bloat", v).unwrap();
        panel
    }

    #[test]
    fn stable_ranks_give_identity() {
        let q = quintile_transition(&panel(10, 3, |f, _| f as f64), "bloat").unwrap();
        for i in 0..5 {
            assert_eq!(q.matrix[i][i], 100.0);
            assert_eq!(q.counts[i][i], 4);
        }
        assert_eq!(q.period_pairs, 2);
    }

    #[test]
    fn ties_break_by_firm_id() {
        let q = quintile_transition(&panel(5, 2, |_, _| 1.0), "bloat").unwrap();
        for i in 0..5 {
            assert_eq!(q.matrix[i][i], 100.0);
        }
    }

    #[test]
    fn too_few_firms() {
        assert_eq!(
            quintile_transition(&panel(4, 2, |f, _| f as f64), "bloat"),
            Err(Error::TooFewFirms { period: String::from("2000"), firms: 4 })
        );
    }
}
