//! Market inputs from CSV and the per-event outcome table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bloat_core::market::{
    abn_spread, abn_vol, car, daily_counts, daily_quoted_spreads, estimate_pin, ipt, post_vol,
    sue, DailySeries, LeeReady, PinConfig, Quote, ReturnSeries, SpreadVariant, Trade, TradingCalendar,
};
use chrono::{DateTime, NaiveDate, NaiveDateTime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MarketConfig;
use crate::csvio::Table;
use crate::io::fmt_opt;
use crate::{Error, Result};

/// Epoch seconds from an integer, RFC 3339, or `YYYY-MM-DD HH:MM:SS` (UTC).
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(t) = s.parse::<i64>() {
        return Some(t);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S").ok().map(|t| t.and_utc().timestamp())
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub doc_id: String,
    pub firm_id: String,
    pub event_date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Earnings {
    pub eps_actual: f64,
    pub price: f64,
}

/// Everything the market stage reads.
#[derive(Debug, Default)]
pub struct MarketData {
    pub returns: BTreeMap<String, ReturnSeries>,
    pub trades: BTreeMap<String, Vec<Trade>>,
    pub quotes: BTreeMap<String, Vec<Quote>>,
    pub spreads: BTreeMap<String, DailySeries>,
    pub events: Vec<Event>,
    pub earnings: BTreeMap<(String, String), Earnings>,
    /// Latest estimate per analyst.
    pub estimates: BTreeMap<(String, String), BTreeMap<String, f64>>,
    pub holidays: Vec<NaiveDate>,
}

pub const RETURNS_COLUMNS: [&str; 4] = ["firm_id", "date", "ret", "mkt_ret"];
pub const TRADES_COLUMNS: [&str; 4] = ["firm_id", "ts", "price", "size"];
pub const QUOTES_COLUMNS: [&str; 4] = ["firm_id", "ts", "bid", "ask"];
pub const SPREADS_COLUMNS: [&str; 3] = ["firm_id", "date", "spread"];
pub const EVENTS_COLUMNS: [&str; 3] = ["doc_id", "firm_id", "event_date"];
pub const EARNINGS_COLUMNS: [&str; 4] = ["firm_id", "period", "eps_actual", "price"];
pub const ESTIMATES_COLUMNS: [&str; 4] = ["firm_id", "period", "analyst_id", "estimate"];

fn read_returns(path: &Path) -> Result<BTreeMap<String, ReturnSeries>> {
    let t = Table::read(path, &RETURNS_COLUMNS)?;
    let mut rows: BTreeMap<String, Vec<(NaiveDate, f64, f64)>> = BTreeMap::new();
    for (i, r) in t.rows.iter().enumerate() {
        let date = parse_date(t.get(r, "date")).ok_or_else(|| t.err(i, "date: expected YYYY-MM-DD"))?;
        rows.entry(t.get(r, "firm_id").to_string()).or_default().push((date, t.f64(i, "ret")?, t.f64(i, "mkt_ret")?));
    }
    rows.into_iter()
        .map(|(firm, mut r)| {
            r.sort_by_key(|x| x.0);
            let series = ReturnSeries::new(firm.clone(), r)
                .map_err(|e| Error::Parse { path: path.into(), line: 0, message: format!("firm {firm}: {e}") })?;
            Ok((firm, series))
        })
        .collect()
}

fn read_ticks<T>(path: &Path, cols: [&str; 3], make: impl Fn(i64, f64, f64) -> T, ts: impl Fn(&T) -> i64) -> Result<BTreeMap<String, Vec<T>>> {
    let t = Table::read(path, &["firm_id", "ts", cols[1], cols[2]])?;
    let mut out: BTreeMap<String, Vec<T>> = BTreeMap::new();
    for (i, r) in t.rows.iter().enumerate() {
        let stamp = parse_timestamp(t.get(r, "ts")).ok_or_else(|| t.err(i, "ts: expected epoch seconds or a timestamp"))?;
        out.entry(t.get(r, "firm_id").to_string()).or_default().push(make(stamp, t.f64(i, cols[1])?, t.f64(i, cols[2])?));
    }
    for v in out.values_mut() {
        v.sort_by_key(&ts);
    }
    Ok(out)
}

impl MarketData {
    pub fn load(paths: &crate::config::Paths) -> Result<Self> {
        let mut m = MarketData::default();
        if let Some(p) = &paths.returns {
            m.returns = read_returns(p)?;
        }
        if let Some(p) = &paths.trades {
            m.trades = read_ticks(p, ["ts", "price", "size"], |ts, price, size| Trade { ts, price, size }, |t| t.ts)?;
        }
        if let Some(p) = &paths.quotes {
            m.quotes = read_ticks(p, ["ts", "bid", "ask"], |ts, bid, ask| Quote { ts, bid, ask }, |q| q.ts)?;
        }
        if let Some(p) = &paths.spreads {
            let t = Table::read(p, &SPREADS_COLUMNS)?;
            let mut rows: BTreeMap<String, Vec<(NaiveDate, f64)>> = BTreeMap::new();
            for (i, r) in t.rows.iter().enumerate() {
                let date = parse_date(t.get(r, "date")).ok_or_else(|| t.err(i, "date: expected YYYY-MM-DD"))?;
                rows.entry(t.get(r, "firm_id").to_string()).or_default().push((date, t.f64(i, "spread")?));
            }
            for (firm, r) in rows {
                let s = DailySeries::new(r).map_err(|e| Error::Parse { path: p.clone(), line: 0, message: format!("firm {firm}: {e}") })?;
                m.spreads.insert(firm, s);
            }
        }
        if let Some(p) = &paths.events {
            let t = Table::read(p, &EVENTS_COLUMNS)?;
            for (i, r) in t.rows.iter().enumerate() {
                let event_date =
                    parse_date(t.get(r, "event_date")).ok_or_else(|| t.err(i, "event_date: expected YYYY-MM-DD"))?;
                m.events.push(Event { doc_id: t.get(r, "doc_id").into(), firm_id: t.get(r, "firm_id").into(), event_date });
            }
        }
        if let Some(p) = &paths.earnings {
            let t = Table::read(p, &EARNINGS_COLUMNS)?;
            for (i, r) in t.rows.iter().enumerate() {
                let key = (t.get(r, "firm_id").to_string(), t.get(r, "period").to_string());
                m.earnings.insert(key, Earnings { eps_actual: t.f64(i, "eps_actual")?, price: t.f64(i, "price")? });
            }
        }
        if let Some(p) = &paths.estimates {
            let t = Table::read(p, &ESTIMATES_COLUMNS)?;
            for (i, r) in t.rows.iter().enumerate() {
                let key = (t.get(r, "firm_id").to_string(), t.get(r, "period").to_string());
                m.estimates.entry(key).or_default().insert(t.get(r, "analyst_id").into(), t.f64(i, "estimate")?);
            }
        }
        if let Some(p) = &paths.holidays {
            for (i, line) in crate::io::read_to_string(p)?.lines().enumerate() {
                let l = line.trim();
                if l.is_empty() || l.starts_with('#') {
                    continue;
                }
                let d = parse_date(l).ok_or_else(|| Error::Parse { path: p.clone(), line: i + 1, message: "expected YYYY-MM-DD".into() })?;
                m.holidays.push(d);
            }
        }
        Ok(m)
    }

    /// Weekdays minus holidays between the configured bounds, or over the
    /// span of the returns file.
    pub fn calendar(&self, cfg: &MarketConfig) -> Result<TradingCalendar> {
        let dates = self.returns.values().flat_map(|s| s.dates().iter().copied());
        let (lo, hi) = dates.fold((None, None), |(lo, hi): (Option<NaiveDate>, Option<NaiveDate>), d| {
            (Some(lo.map_or(d, |l| l.min(d))), Some(hi.map_or(d, |h| h.max(d))))
        });
        let start = cfg.calendar_start.or(lo);
        let end = cfg.calendar_end.or(hi);
        match (start, end) {
            (Some(s), Some(e)) => Ok(TradingCalendar::weekdays(s, e, &self.holidays)?),
            _ => Err(Error::Config("market.calendar_start/calendar_end are required without a returns file".into())),
        }
    }
}

/// Outcome variables for one disclosure event. `None` marks a value that
/// could not be computed from the available data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketRow {
    pub doc_id: String,
    pub firm_id: String,
    pub event_date: NaiveDate,
    pub car: Vec<Option<f64>>,
    pub ipt: Option<f64>,
    pub post_vol: Option<f64>,
    pub pre_vol: Option<f64>,
    pub abn_vol: Option<f64>,
    pub abn_spread: Option<f64>,
    pub abn_spread_5d: Option<f64>,
    pub pin: Option<f64>,
    pub sue: Option<f64>,
}

pub fn car_column(window: (i64, i64)) -> String {
    let f = |x: i64| if x < 0 { format!("m{}", -x) } else { x.to_string() };
    format!("car_{}_{}", f(window.0), f(window.1))
}

pub fn columns(cfg: &MarketConfig) -> Vec<String> {
    let mut c: Vec<String> = cfg.car_windows.iter().map(|w| car_column(*w)).collect();
    c.extend(
        ["ipt", "post_vol", "pre_vol", "abn_vol", "abn_spread", "abn_spread_5d", "pin", "sue"].map(String::from),
    );
    c
}

impl MarketRow {
    pub fn values(&self) -> Vec<Option<f64>> {
        let mut v = self.car.clone();
        v.extend([
            self.ipt,
            self.post_vol,
            self.pre_vol,
            self.abn_vol,
            self.abn_spread,
            self.abn_spread_5d,
            self.pin,
            self.sue,
        ]);
        v
    }
}

fn ok<T>(what: &str, doc_id: &str, r: bloat_core::Result<T>) -> Option<T> {
    r.map_err(|e| tracing::debug!(doc_id, "{what} unavailable: {e}")).ok()
}

struct FirmFlow {
    counts: BTreeMap<NaiveDate, (u64, u64)>,
    spreads: Option<DailySeries>,
}

/// Computes every outcome for every event, firms in parallel. `periods`
/// maps doc_id to the document period used to match earnings.
pub fn compute(data: &MarketData, cfg: &MarketConfig, periods: &BTreeMap<String, String>) -> Result<Vec<MarketRow>> {
    let calendar = data.calendar(cfg)?;
    let firms: Vec<&String> = {
        let mut f: Vec<&String> = data.events.iter().map(|e| &e.firm_id).collect();
        f.sort();
        f.dedup();
        f
    };
    let flows: BTreeMap<&String, FirmFlow> = firms
        .par_iter()
        .map(|firm| {
            let trades = data.trades.get(*firm).map(Vec::as_slice).unwrap_or(&[]);
            let quotes = data.quotes.get(*firm).map(Vec::as_slice).unwrap_or(&[]);
            let mut lr = LeeReady::new(quotes, cfg.quote_lag);
            let directions: Vec<_> = trades.iter().map(|t| lr.classify(t)).collect();
            let counts = daily_counts(trades, &directions);
            let spreads = data
                .spreads
                .get(*firm)
                .cloned()
                .or_else(|| (!quotes.is_empty()).then(|| daily_quoted_spreads(quotes, cfg.spread_weighting)));
            (*firm, FirmFlow { counts, spreads })
        })
        .collect();
    let pin_cfg = PinConfig { starts: cfg.pin_starts, min_days: cfg.pin_min_days, symmetric: cfg.pin_symmetric, ..Default::default() };
    Ok(data
        .events
        .par_iter()
        .map(|ev| {
            let id = ev.doc_id.as_str();
            let series = data.returns.get(&ev.firm_id);
            let flow = &flows[&ev.firm_id];
            let d = ev.event_date;
            let car_values = cfg
                .car_windows
                .iter()
                .map(|w| series.and_then(|s| ok("car", id, car(s, &calendar, d, *w))))
                .collect();
            let ipt_v = series.and_then(|s| ok("ipt", id, ipt(s, &calendar, d)));
            let post = series.and_then(|s| ok("post_vol", id, post_vol(s, &calendar, d, cfg.post_vol_window, cfg.min_obs)));
            let pre = series.and_then(|s| ok("pre_vol", id, post_vol(s, &calendar, d, cfg.pre_vol_window, cfg.min_obs)));
            let abn_v = pre.zip(post).and_then(|(a, b)| ok("abn_vol", id, abn_vol(a, b)));
            let spread = |v| flow.spreads.as_ref().and_then(|s| ok("abn_spread", id, abn_spread(s, &calendar, d, v)));
            let pin_v = calendar.window(d, cfg.pin_window).and_then(|days| {
                let counts: Vec<(u64, u64)> = days.iter().map(|day| flow.counts.get(day).copied().unwrap_or((0, 0))).collect();
                ok("pin", id, estimate_pin(&counts, &pin_cfg)).map(|e| e.pin)
            });
            let sue_v = periods.get(&ev.doc_id).and_then(|period| {
                let key = (ev.firm_id.clone(), period.clone());
                let e = data.earnings.get(&key)?;
                let est: Vec<f64> = data.estimates.get(&key).map(|m| m.values().copied().collect()).unwrap_or_default();
                ok("sue", id, sue(e.eps_actual, &est, e.price, cfg.consensus)).flatten()
            });
            MarketRow {
                doc_id: ev.doc_id.clone(),
                firm_id: ev.firm_id.clone(),
                event_date: d,
                car: car_values,
                ipt: ipt_v,
                post_vol: post,
                pre_vol: pre,
                abn_vol: abn_v,
                abn_spread: spread(SpreadVariant::EventDay),
                abn_spread_5d: spread(SpreadVariant::FiveDay),
                pin: pin_v,
                sue: sue_v,
            }
        })
        .collect())
}

pub fn to_csv(rows: &[MarketRow], cfg: &MarketConfig) -> String {
    let mut out = format!("doc_id,firm_id,event_date,{}\n", columns(cfg).join(","));
    for r in rows {
        let _ = write!(out, "{},{},{}", r.doc_id, r.firm_id, r.event_date);
        for v in r.values() {
            out.push(',');
            out.push_str(&fmt_opt(v));
        }
        out.push('\n');
    }
    out
}

/// Reads a market table back as `doc_id → column → value`.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, BTreeMap<String, BTreeMap<String, Option<f64>>>)> {
    let t = Table::read(path, &["doc_id", "firm_id", "event_date"])?;
    let fields: Vec<String> = t.headers.iter().skip(3).cloned().collect();
    let mut out = BTreeMap::new();
    for (i, r) in t.rows.iter().enumerate() {
        let mut m = BTreeMap::new();
        for f in &fields {
            m.insert(f.clone(), t.opt_f64(i, f)?);
        }
        out.insert(t.get(r, "doc_id").to_string(), m);
    }
    Ok((fields, out))
}
