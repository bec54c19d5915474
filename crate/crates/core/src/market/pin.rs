use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::{Error, Result};

/// Parameters of the sequential trade model: information-event
/// probability `alpha`, bad-news probability `delta`, informed arrival
/// rate `mu` and uninformed buy/sell rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinParams {
    pub alpha: f64,
    pub delta: f64,
    pub mu: f64,
    pub eps_b: f64,
    pub eps_s: f64,
}

impl PinParams {
    pub fn pin(&self) -> f64 {
        pin(self.alpha, self.mu, self.eps_b, self.eps_s)
    }
}

/// `αμ/(αμ + ε_b + ε_s)`.
pub fn pin(alpha: f64, mu: f64, eps_b: f64, eps_s: f64) -> f64 {
    let informed = alpha * mu;
    let total = informed + eps_b + eps_s;
    if total > 0.0 {
        informed / total
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PinConfig {
    pub starts: usize,
    pub seed: u64,
    pub min_days: usize,
    /// Impose `ε_b = ε_s`.
    pub symmetric: bool,
}

impl Default for PinConfig {
    fn default() -> Self {
        PinConfig { starts: 20, seed: 0x5eed, min_days: 20, symmetric: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinEstimate {
    pub params: PinParams,
    pub pin: f64,
    pub loglik: f64,
    /// Index of the start that produced the estimate.
    pub best_start: usize,
    pub converged_starts: usize,
}

fn ln_poisson(k: f64, lambda: f64, ln_k_fact: f64) -> f64 {
    if lambda <= 0.0 {
        return if k == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k * libm::log(lambda) - lambda - ln_k_fact
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(terms.iter().map(|t| libm::exp(t - max)).sum::<f64>())
}

fn ln_weight(p: f64) -> f64 {
    if p > 0.0 {
        libm::log(p)
    } else {
        f64::NEG_INFINITY
    }
}

/// Log-likelihood of daily `(buys, sells)` counts, evaluated as a
/// log-sum-exp over the no-news, bad-news and good-news regimes.
pub fn log_likelihood(p: &PinParams, counts: &[(u64, u64)]) -> f64 {
    let facts: Vec<(f64, f64, f64, f64)> = counts
        .iter()
        .map(|&(b, s)| (b as f64, s as f64, libm::lgamma(b as f64 + 1.0), libm::lgamma(s as f64 + 1.0)))
        .collect();
    loglik_prepared(p, &facts)
}

fn loglik_prepared(p: &PinParams, facts: &[(f64, f64, f64, f64)]) -> f64 {
    let w_none = ln_weight(1.0 - p.alpha);
    let w_bad = ln_weight(p.alpha * p.delta);
    let w_good = ln_weight(p.alpha * (1.0 - p.delta));
    facts
        .iter()
        .map(|&(b, s, fb, fs)| {
            let base_b = ln_poisson(b, p.eps_b, fb);
            let base_s = ln_poisson(s, p.eps_s, fs);
            log_sum_exp(&[
                w_none + base_b + base_s,
                w_bad + base_b + ln_poisson(s, p.eps_s + p.mu, fs),
                w_good + ln_poisson(b, p.eps_b + p.mu, fb) + base_s,
            ])
        })
        .sum()
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

fn decode(theta: &[f64], symmetric: bool) -> PinParams {
    let eps_b = libm::exp(theta[3]);
    PinParams {
        alpha: logistic(theta[0]),
        delta: logistic(theta[1]),
        mu: libm::exp(theta[2]),
        eps_b,
        eps_s: if symmetric { eps_b } else { libm::exp(theta[4]) },
    }
}

fn encode(p: &PinParams, symmetric: bool) -> Vec<f64> {
    let mut v = alloc::vec![logit(p.alpha), logit(p.delta), libm::log(p.mu), libm::log(p.eps_b)];
    if !symmetric {
        v.push(libm::log(p.eps_s));
    }
    v
}

/// Maximum-likelihood PIN from daily buy/sell counts, using seeded random
/// starts and Nelder–Mead in an unconstrained parameterization. The best
/// start by log-likelihood wins; ties go to the lower start index.
pub fn estimate_pin(counts: &[(u64, u64)], cfg: &PinConfig) -> Result<PinEstimate> {
    if counts.len() < cfg.min_days.max(1) {
        return Err(Error::InsufficientData(alloc::format!("{} days of counts, need {}", counts.len(), cfg.min_days)));
    }
    if counts.iter().all(|&(b, s)| b == 0 && s == 0) {
        return Err(Error::DegenerateCounts);
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidParameter(String::from("PIN needs at least one start")));
    }
    let n = counts.len() as f64;
    let mean_b = (counts.iter().map(|c| c.0).sum::<u64>() as f64 / n).max(0.5);
    let mean_s = (counts.iter().map(|c| c.1).sum::<u64>() as f64 / n).max(0.5);
    let facts: Vec<(f64, f64, f64, f64)> = counts
        .iter()
        .map(|&(b, s)| (b as f64, s as f64, libm::lgamma(b as f64 + 1.0), libm::lgamma(s as f64 + 1.0)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nm = NelderMeadConfig::default();
    let mut best: Option<PinEstimate> = None;
    let mut converged_starts = 0;
    for start in 0..cfg.starts {
        let alpha = rng.random_range(0.05..0.95);
        let delta = rng.random_range(0.05..0.95);
        let eps_b = mean_b * rng.random_range(0.3..1.0);
        let eps_s = if cfg.symmetric { eps_b } else { mean_s * rng.random_range(0.3..1.0) };
        let mu = ((mean_b + mean_s) / 2.0 * rng.random_range(0.2..1.5) / alpha).max(0.1);
        let init = PinParams { alpha, delta, mu, eps_b, eps_s };
        let m = nelder_mead(|th| -loglik_prepared(&decode(th, cfg.symmetric), &facts), &encode(&init, cfg.symmetric), &nm);
        if !m.value.is_finite() {
            continue;
        }
        if m.converged {
            converged_starts += 1;
        }
        let loglik = -m.value;
        if best.as_ref().is_none_or(|b| loglik > b.loglik) {
            let params = decode(&m.x, cfg.symmetric);
            best = Some(PinEstimate { params, pin: params.pin(), loglik, best_start: start, converged_starts: 0 });
        }
    }
    match best {
        Some(mut b) if converged_starts > 0 => {
            b.converged_starts = converged_starts;
            Ok(b)
        }
        _ => Err(Error::DidNotConverge),
    }
}
