use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use super::TradingCalendar;
use crate::{Error, Result};

pub const DEFAULT_CAR_WINDOW: (i64, i64) = (0, 1);
pub const POST_VOL_WINDOW: (i64, i64) = (6, 28);
pub const PRE_VOL_WINDOW: (i64, i64) = (-257, -6);

/// Daily firm returns paired with the market return on the same date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub firm_id: String,
    dates: Vec<NaiveDate>,
    ret: Vec<f64>,
    mkt: Vec<f64>,
}

impl ReturnSeries {
    /// Rows are `(date, raw_return, market_return)` in strictly increasing
    /// date order.
    pub fn new(firm_id: impl Into<String>, rows: impl IntoIterator<Item = (NaiveDate, f64, f64)>) -> Result<Self> {
        let (mut dates, mut ret, mut mkt) = (Vec::new(), Vec::new(), Vec::new());
        for (d, r, m) in rows {
            if dates.last().is_some_and(|last| *last >= d) {
                return Err(Error::InvalidParameter(alloc::format!("return dates not strictly increasing at {d}")));
            }
            if !(r.is_finite() && m.is_finite() && r > -1.0 && m > -1.0) {
                return Err(Error::InvalidParameter(alloc::format!("return on {d} is not finite or is at most -100%")));
            }
            dates.push(d);
            ret.push(r);
            mkt.push(m);
        }
        Ok(ReturnSeries { firm_id: firm_id.into(), dates, ret, mkt })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// `(raw, market)` on `date`.
    pub fn get(&self, date: NaiveDate) -> Option<(f64, f64)> {
        self.dates.binary_search(&date).ok().map(|i| (self.ret[i], self.mkt[i]))
    }

    pub fn abnormal(&self, date: NaiveDate) -> Option<f64> {
        self.get(date).map(|(r, m)| r - m)
    }
}

fn missing(series: &ReturnSeries, what: &str) -> Error {
    Error::MissingDates(alloc::format!("{}: {what}", series.firm_id))
}

/// Cumulative market-adjusted return over trading-day offsets `[a, b]`.
pub fn car(series: &ReturnSeries, calendar: &TradingCalendar, event: NaiveDate, window: (i64, i64)) -> Result<f64> {
    let days = calendar
        .window(event, window)
        .ok_or_else(|| missing(series, "window extends beyond the calendar"))?;
    days.iter()
        .map(|d| series.abnormal(*d).ok_or_else(|| missing(series, &alloc::format!("no return on {d}"))))
        .sum()
}

/// Intraperiod timeliness: `Σᵢ₌₀⁴ CAR[0,i]/CAR[0,5] + ½`.
pub fn ipt(series: &ReturnSeries, calendar: &TradingCalendar, event: NaiveDate) -> Result<f64> {
    let days = calendar
        .window(event, (0, 5))
        .ok_or_else(|| missing(series, "window extends beyond the calendar"))?;
    let mut cum = [0.0; 6];
    let mut acc = 0.0;
    for (c, d) in cum.iter_mut().zip(days) {
        acc += series.abnormal(*d).ok_or_else(|| missing(series, &alloc::format!("no return on {d}")))?;
        *c = acc;
    }
    let total = cum[5];
    if total == 0.0 {
        return Err(Error::ZeroTotalReturn);
    }
    Ok(cum[..5].iter().map(|c| c / total).sum::<f64>() + 0.5)
}

/// Root mean squared residual of the market model `r = a + b·m` fitted over
/// the window, dividing by `T − 2`. Dates absent from the series are
/// skipped; fewer than `min_obs` usable days is an error.
pub fn post_vol(
    series: &ReturnSeries,
    calendar: &TradingCalendar,
    event: NaiveDate,
    window: (i64, i64),
    min_obs: usize,
) -> Result<f64> {
    let zero = calendar
        .event_index(event)
        .ok_or_else(|| missing(series, "event after the calendar"))? as i64;
    let days = calendar.days();
    let pairs: Vec<(f64, f64)> = (window.0..=window.1)
        .filter_map(|k| usize::try_from(zero + k).ok())
        .filter_map(|i| days.get(i))
        .filter_map(|d| series.get(*d))
        .collect();
    let needed = min_obs.max(3);
    if pairs.len() < needed {
        return Err(Error::InsufficientData(alloc::format!(
            "{}: {} returns in window, need {needed}",
            series.firm_id,
            pairs.len()
        )));
    }
    let t = pairs.len() as f64;
    let mean_r = pairs.iter().map(|p| p.0).sum::<f64>() / t;
    let mean_m = pairs.iter().map(|p| p.1).sum::<f64>() / t;
    let sxx: f64 = pairs.iter().map(|p| (p.1 - mean_m) * (p.1 - mean_m)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.1 - mean_m) * (p.0 - mean_r)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = mean_r - b * mean_m;
    let ssr: f64 = pairs.iter().map(|(r, m)| (r - a - b * m) * (r - a - b * m)).sum();
    Ok(libm::sqrt(ssr / (t - 2.0)))
}

/// `(post − pre)/pre`.
pub fn abn_vol(pre: f64, post: f64) -> Result<f64> {
    if pre <= 0.0 {
        return Err(Error::ZeroPreVolatility);
    }
    Ok((post - pre) / pre)
}
