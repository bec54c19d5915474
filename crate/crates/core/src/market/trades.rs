use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Seconds a quote must precede a trade to count as prevailing.
pub const DEFAULT_QUOTE_LAG: i64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    /// Seconds since the Unix epoch.
    pub ts: i64,
    pub price: f64,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub ts: i64,
    pub bid: f64,
    pub ask: f64,
}

impl Quote {
    pub fn midpoint(&self) -> f64 {
        (self.bid + self.ask) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeTape {
    pub firm_id: String,
    pub trades: Vec<Trade>,
    pub quotes: Vec<Quote>,
}

impl TradeTape {
    pub fn new(firm_id: impl Into<String>, trades: Vec<Trade>, quotes: Vec<Quote>) -> Result<Self> {
        if trades.windows(2).any(|w| w[1].ts < w[0].ts) || quotes.windows(2).any(|w| w[1].ts < w[0].ts) {
            return Err(Error::InvalidParameter(String::from("tape timestamps must be nondecreasing")));
        }
        if let Some(q) = quotes.iter().find(|q| !(q.bid <= q.ask)) {
            return Err(Error::InvalidParameter(alloc::format!("crossed quote at {}", q.ts)));
        }
        if trades.iter().any(|t| !(t.price > 0.0)) {
            return Err(Error::NonpositivePrice);
        }
        Ok(TradeTape { firm_id: firm_id.into(), trades, quotes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Buy,
    Sell,
}

/// Streaming Lee-Ready classifier: feed trades in time order, in any
/// batch sizes.
#[derive(Debug, Clone)]
pub struct LeeReady<'q> {
    quotes: &'q [Quote],
    lag: i64,
    next_quote: usize,
    prevailing: Option<Quote>,
    last_price: Option<f64>,
    last_tick: Option<Direction>,
}

impl<'q> LeeReady<'q> {
    pub fn new(quotes: &'q [Quote], lag: i64) -> Self {
        LeeReady { quotes, lag, next_quote: 0, prevailing: None, last_price: None, last_tick: None }
    }

    /// Quote rule against the latest quote at least `lag` before the trade,
    /// then the tick test at the midpoint or without a quote. `None` when
    /// neither applies.
    pub fn classify(&mut self, trade: &Trade) -> Option<Direction> {
        let cutoff = trade.ts.saturating_sub(self.lag);
        while let Some(q) = self.quotes.get(self.next_quote).filter(|q| q.ts <= cutoff) {
            self.prevailing = Some(*q);
            self.next_quote += 1;
        }
        if let Some(last) = self.last_price {
            if trade.price > last {
                self.last_tick = Some(Direction::Buy);
            } else if trade.price < last {
                self.last_tick = Some(Direction::Sell);
            }
        }
        self.last_price = Some(trade.price);
        match self.prevailing.map(|q| q.midpoint()) {
            Some(mid) if trade.price > mid => Some(Direction::Buy),
            Some(mid) if trade.price < mid => Some(Direction::Sell),
            _ => self.last_tick,
        }
    }
}

/// Directions for every trade; `None` for trades no rule can sign.
pub fn classify_trades_lenient(tape: &TradeTape, lag: i64) -> Vec<Option<Direction>> {
    let mut lr = LeeReady::new(&tape.quotes, lag);
    tape.trades.iter().map(|t| lr.classify(t)).collect()
}

/// Directions for every trade; an unsignable trade is an error.
pub fn classify_trades(tape: &TradeTape, lag: i64) -> Result<Vec<Direction>> {
    classify_trades_lenient(tape, lag)
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or(Error::UnclassifiableLeadingTrade(i)))
        .collect()
}

/// Buy and sell trade counts per UTC calendar day. Unsigned trades are
/// skipped.
pub fn daily_counts(trades: &[Trade], directions: &[Option<Direction>]) -> BTreeMap<NaiveDate, (u64, u64)> {
    let mut out: BTreeMap<NaiveDate, (u64, u64)> = BTreeMap::new();
    for (t, d) in trades.iter().zip(directions) {
        let Some(date) = DateTime::from_timestamp(t.ts, 0).map(|dt| dt.date_naive()) else {
            continue;
        };
        let e = out.entry(date).or_default();
        match d {
            Some(Direction::Buy) => e.0 += 1,
            Some(Direction::Sell) => e.1 += 1,
            None => {}
        }
    }
    out
}
