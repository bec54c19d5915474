//! Event-study and microstructure outcomes around a disclosure date.
//!
//! Offsets are counted in trading days on a caller-supplied
//! [`TradingCalendar`]; day 0 is the event date, or the next trading day
//! when the event falls on a weekend or holiday.

mod calendar;
mod pin;
mod returns;
mod spread;
mod sue;
mod trades;

pub use calendar::TradingCalendar;
pub use pin::{estimate_pin, log_likelihood, pin, PinConfig, PinEstimate, PinParams};
pub use returns::{abn_vol, car, ipt, post_vol, ReturnSeries, DEFAULT_CAR_WINDOW, POST_VOL_WINDOW, PRE_VOL_WINDOW};
pub use spread::{abn_spread, daily_quoted_spreads, DailySeries, SpreadVariant, SpreadWeighting};
pub use sue::{sue, Consensus};
pub use trades::{
    classify_trades, classify_trades_lenient, daily_counts, Direction, LeeReady, Quote, Trade, TradeTape, DEFAULT_QUOTE_LAG,
};
