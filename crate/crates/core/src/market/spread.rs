use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{Quote, TradingCalendar};
use crate::{Error, Result};

/// A dated daily series, dates strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DailySeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl DailySeries {
    pub fn new(rows: impl IntoIterator<Item = (NaiveDate, f64)>) -> Result<Self> {
        let mut s = DailySeries::default();
        for (d, v) in rows {
            if s.dates.last().is_some_and(|last| *last >= d) {
                return Err(Error::InvalidParameter(alloc::format!("series dates not strictly increasing at {d}")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!("non-finite value on {d}")));
            }
            s.dates.push(d);
            s.values.push(v);
        }
        Ok(s)
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadVariant {
    /// Spread on day 0.
    #[default]
    EventDay,
    /// Mean spread over days 0 to 4.
    FiveDay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadWeighting {
    #[default]
    TimeWeighted,
    Simple,
}

/// Post-event spread minus the mean spread over trading days −10 to −1.
/// Missing pre-window days are skipped; day 0 must be present.
pub fn abn_spread(spreads: &DailySeries, calendar: &TradingCalendar, event: NaiveDate, variant: SpreadVariant) -> Result<f64> {
    let missing = |what: &str| Error::MissingDates(String::from(what));
    let pre_days = calendar.window(event, (-10, -1)).ok_or_else(|| missing("pre-event window outside the calendar"))?;
    let pre: Vec<f64> = pre_days.iter().filter_map(|d| spreads.get(*d)).collect();
    if pre.is_empty() {
        return Err(missing("no spreads in the pre-event window"));
    }
    let day0 = calendar.offset(event, 0).ok_or_else(|| missing("event after the calendar"))?;
    let event_spread = spreads.get(day0).ok_or_else(|| missing("no spread on the event day"))?;
    let post = match variant {
        SpreadVariant::EventDay => event_spread,
        SpreadVariant::FiveDay => {
            let days = calendar.window(event, (0, 4)).ok_or_else(|| missing("post window outside the calendar"))?;
            let vals: Vec<f64> = days.iter().filter_map(|d| spreads.get(*d)).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };
    Ok(post - pre.iter().sum::<f64>() / pre.len() as f64)
}

/// Daily relative quoted spread `(ask − bid)/midpoint` per UTC day.
/// Time weighting gives each quote the time until the next quote that day;
/// a day's last quote carries no weight unless it is the only one.
pub fn daily_quoted_spreads(quotes: &[Quote], weighting: SpreadWeighting) -> DailySeries {
    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    let day_of = |q: &Quote| DateTime::from_timestamp(q.ts, 0).map(|d| d.date_naive());
    let valid: Vec<&Quote> = quotes.iter().filter(|q| q.midpoint() > 0.0 && day_of(q).is_some()).collect();
    let mut start = 0;
    while start < valid.len() {
        let day = day_of(valid[start]).unwrap_or_default();
        let mut end = start;
        while end < valid.len() && day_of(valid[end]) == Some(day) {
            end += 1;
        }
        let group = &valid[start..end];
        let rel = |q: &Quote| (q.ask - q.bid) / q.midpoint();
        let simple = group.iter().map(|q| rel(q)).sum::<f64>() / group.len() as f64;
        let value = match weighting {
            SpreadWeighting::Simple => simple,
            SpreadWeighting::TimeWeighted => {
                let (mut num, mut den) = (0.0, 0.0);
                for w in group.windows(2) {
                    let dt = (w[1].ts - w[0].ts) as f64;
                    num += dt * rel(w[0]);
                    den += dt;
                }
                if den > 0.0 {
                    num / den
                } else {
                    simple
                }
            }
        };
        rows.push((day, value));
        start = end;
    }
    DailySeries { dates: rows.iter().map(|r| r.0).collect(), values: rows.iter().map(|r| r.1).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cal() -> (TradingCalendar, NaiveDate) {
        let start = NaiveDate::from_ymd_opt(2023, 1, 2).unwrap();
        let cal = TradingCalendar::weekdays(start, NaiveDate::from_ymd_opt(2023, 3, 31).unwrap(), &[]).unwrap();
        let event = cal.days()[15];
        (cal, event)
    }

    #[test]
    fn flat_and_shifted() {
        let (cal, event) = cal();
        let flat = DailySeries::new(cal.days().iter().map(|d| (*d, 0.02))).unwrap();
        assert!(abn_spread(&flat, &cal, event, SpreadVariant::EventDay).unwrap().abs() < 1e-15);
        let bumped = DailySeries::new(cal.days().iter().map(|d| (*d, if *d == event { 0.05 } else { 0.02 }))).unwrap();
        assert!((abn_spread(&bumped, &cal, event, SpreadVariant::EventDay).unwrap() - 0.03).abs() < 1e-15);
        assert!((abn_spread(&bumped, &cal, event, SpreadVariant::FiveDay).unwrap() - 0.006).abs() < 1e-15);
    }

    #[test]
    fn missing_days() {
        let (cal, event) = cal();
        let only_pre = DailySeries::new(cal.days()[..15].iter().map(|d| (*d, 0.02))).unwrap();
        assert!(matches!(abn_spread(&only_pre, &cal, event, SpreadVariant::EventDay), Err(Error::MissingDates(_))));
        let sparse = DailySeries::new([(cal.days()[14], 0.01), (event, 0.03)]).unwrap();
        assert!((abn_spread(&sparse, &cal, event, SpreadVariant::EventDay).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn quoted_spreads() {
        let day = 86_400;
        let quotes = vec![
            Quote { ts: 0, bid: 9.9, ask: 10.1 },
            Quote { ts: 30, bid: 9.8, ask: 10.2 },
            Quote { ts: 40, bid: 9.8, ask: 10.2 },
            Quote { ts: day, bid: 19.9, ask: 20.1 },
        ];
        let tw = daily_quoted_spreads(&quotes, SpreadWeighting::TimeWeighted);
        let v: Vec<f64> = tw.iter().map(|r| r.1).collect();
        assert!((v[0] - (30.0 * 0.02 + 10.0 * 0.04) / 40.0).abs() < 1e-12);
        assert!((v[1] - 0.01).abs() < 1e-12);
        let simple = daily_quoted_spreads(&quotes, SpreadWeighting::Simple);
        assert!((simple.iter().next().unwrap().1 - (0.02 + 0.04 + 0.04) / 3.0).abs() < 1e-12);
    }
}
