use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::RelevanceProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityShape {
    #[default]
    Linear,
}

/// Slopes of the reader's benefit and cost functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UtilityParams {
    pub benefit_slope: f64,
    pub cost_slope: f64,
    pub benefit_shape: UtilityShape,
    pub cost_shape: UtilityShape,
}

impl Default for UtilityParams {
    fn default() -> Self {
        UtilityParams { benefit_slope: 1.0, cost_slope: 1.0, benefit_shape: UtilityShape::Linear, cost_shape: UtilityShape::Linear }
    }
}

impl UtilityParams {
    pub fn linear(benefit_slope: f64, cost_slope: f64) -> Result<Self> {
        let p = UtilityParams { benefit_slope, cost_slope, ..Default::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.benefit_slope > 0.0 && self.benefit_slope.is_finite() && self.cost_slope > 0.0 && self.cost_slope.is_finite()) {
            return Err(Error::InvalidParameter(String::from("utility slopes must be positive and finite")));
        }
        Ok(())
    }
}

/// `U(k)` for `k = 0..=n` over the descending relevance sequence.
pub fn utility_curve(profile: &RelevanceProfile, params: &UtilityParams) -> Vec<f64> {
    let (b, c) = (params.benefit_slope, params.cost_slope);
    let mut curve = Vec::with_capacity(profile.len() + 1);
    let (mut benefit, mut cost) = (0.0, 0.0);
    curve.push(0.0);
    for s in profile.sorted() {
        benefit += s;
        cost += 1.0 - s;
        curve.push(b * benefit - c * cost);
    }
    curve
}

/// The utility-maximizing summary length, found by evaluating every `k`;
/// the smallest maximizer wins ties.
pub fn optimal_length(profile: &RelevanceProfile, params: &UtilityParams) -> usize {
    let curve = utility_curve(profile, params);
    let mut best = 0;
    for (k, u) in curve.iter().enumerate() {
        if *u > curve[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn profile(s: Vec<f64>) -> RelevanceProfile {
        RelevanceProfile::from_scores(s).unwrap()
    }

    #[test]
    fn worked_example() {
        let p = profile(vec![0.4, 0.9, 0.6]);
        let curve = utility_curve(&p, &UtilityParams::default());
        let expected = [0.0, 0.8, 1.0, 0.8];
        for (u, e) in curve.iter().zip(expected) {
            assert!((u - e).abs() < 1e-12);
        }
        assert_eq!(optimal_length(&p, &UtilityParams::default()), 2);
    }

    #[test]
    fn extremes() {
        let p = UtilityParams::default();
        assert_eq!(optimal_length(&profile(vec![1.0; 7]), &p), 7);
        assert_eq!(optimal_length(&profile(vec![0.0; 7]), &p), 0);
        assert_eq!(optimal_length(&profile(vec![]), &p), 0);
    }

    #[test]
    fn ties_pick_the_shorter_summary() {
        // s = 0.5 adds nothing at equal slopes.
        assert_eq!(optimal_length(&profile(vec![0.8, 0.5, 0.5]), &UtilityParams::default()), 1);
    }

    #[test]
    fn cost_slope_shortens() {
        let p = profile(vec![0.9, 0.7, 0.6, 0.3]);
        assert_eq!(optimal_length(&p, &UtilityParams::linear(1.0, 1.0).unwrap()), 3);
        assert_eq!(optimal_length(&p, &UtilityParams::linear(1.0, 3.0).unwrap()), 1);
        assert!(UtilityParams::linear(0.0, 1.0).is_err());
    }
}
