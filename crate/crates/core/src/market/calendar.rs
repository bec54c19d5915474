use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::{Error, Result};

/// Ordered list of trading days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    days: Vec<NaiveDate>,
}

impl TradingCalendar {
    pub fn new(days: impl IntoIterator<Item = NaiveDate>) -> Self {
        let set: BTreeSet<NaiveDate> = days.into_iter().collect();
        TradingCalendar { days: set.into_iter().collect() }
    }

    /// Weekdays from `start` to `end` inclusive, minus `holidays`.
    pub fn weekdays(start: NaiveDate, end: NaiveDate, holidays: &[NaiveDate]) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidParameter(alloc::string::String::from("calendar end precedes start")));
        }
        let holidays: BTreeSet<&NaiveDate> = holidays.iter().collect();
        let days = start
            .iter_days()
            .take_while(|d| *d <= end)
            .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) && !holidays.contains(d));
        Ok(Self::new(days))
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn is_trading_day(&self, date: NaiveDate) -> bool {
        self.days.binary_search(&date).is_ok()
    }

    /// Index of day 0 for an event on `date`.
    pub fn event_index(&self, date: NaiveDate) -> Option<usize> {
        let i = self.days.partition_point(|d| *d < date);
        (i < self.days.len()).then_some(i)
    }

    /// The trading day `offset` days from the event's day 0.
    pub fn offset(&self, event: NaiveDate, offset: i64) -> Option<NaiveDate> {
        let i = self.event_index(event)? as i64 + offset;
        usize::try_from(i).ok().and_then(|i| self.days.get(i).copied())
    }

    /// Trading days at offsets `a..=b`; `None` if the window leaves the
    /// calendar.
    pub fn window(&self, event: NaiveDate, (a, b): (i64, i64)) -> Option<&[NaiveDate]> {
        let zero = self.event_index(event)? as i64;
        let (lo, hi) = (zero + a, zero + b);
        if a > b || lo < 0 || hi >= self.days.len() as i64 {
            return None;
        }
        Some(&self.days[lo as usize..=hi as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn weekend_events_roll_forward() {
        let cal = TradingCalendar::weekdays(d(2021, 1, 1), d(2021, 1, 31), &[d(2021, 1, 18)]).unwrap();
        // 2021-01-02 is a Saturday.
        assert_eq!(cal.offset(d(2021, 1, 2), 0), Some(d(2021, 1, 4)));
        assert_eq!(cal.offset(d(2021, 1, 15), 1), Some(d(2021, 1, 19)));
        assert_eq!(cal.offset(d(2021, 1, 4), -1), Some(d(2021, 1, 1)));
        assert_eq!(cal.offset(d(2021, 1, 4), -2), None);
        assert_eq!(cal.window(d(2021, 1, 4), (0, 2)).unwrap(), &[d(2021, 1, 4), d(2021, 1, 5), d(2021, 1, 6)]);
        assert_eq!(cal.event_index(d(2021, 2, 1)), None);
    }
}
