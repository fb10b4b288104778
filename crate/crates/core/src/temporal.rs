//! Timeline primitives: second-precision timestamps, calendar units and
//! half-open intervals.
//!
//! All arithmetic uses the proleptic Gregorian calendar with no time zone and
//! no leap seconds. Timestamps are restricted to years `0000..=9999`, the span
//! that the four-digit ISO-8601 form can represent; arithmetic leaving that
//! span reports [`TemporalError::OutOfRange`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const MIN_YEAR: i64 = 0;
pub const MAX_YEAR: i64 = 9999;

const SECONDS_PER_MINUTE: i64 = 60;
const SECONDS_PER_HOUR: i64 = 3_600;
const SECONDS_PER_DAY: i64 = 86_400;

/// Token used for an absent interval endpoint.
pub const UNBOUNDED: &str = "...";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("invalid date: {0}")]
    InvalidDate(String),
    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("interval start {start} is not before end {end}")]
    Ordering { start: String, end: String },
    #[error("timestamp outside supported years {MIN_YEAR:04}..={MAX_YEAR:04}")]
    OutOfRange,
}

/// Calendar units, ordered from finest to coarsest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Second,
    Minute,
    Hour,
    Day,
    Week,
    Month,
    Year,
    Century,
}

impl Unit {
    pub const ALL: [Unit; 8] = [
        Unit::Second,
        Unit::Minute,
        Unit::Hour,
        Unit::Day,
        Unit::Week,
        Unit::Month,
        Unit::Year,
        Unit::Century,
    ];

    /// Position in the granularity order; `Second` is 0.
    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Second => "SECOND",
            Unit::Minute => "MINUTE",
            Unit::Hour => "HOUR",
            Unit::Day => "DAY",
            Unit::Week => "WEEK",
            Unit::Month => "MONTH",
            Unit::Year => "YEAR",
            Unit::Century => "CENTURY",
        }
    }

    /// Length in seconds for the units whose length never varies.
    fn fixed_seconds(self) -> Option<i64> {
        match self {
            Unit::Second => Some(1),
            Unit::Minute => Some(SECONDS_PER_MINUTE),
            Unit::Hour => Some(SECONDS_PER_HOUR),
            Unit::Day => Some(SECONDS_PER_DAY),
            Unit::Week => Some(7 * SECONDS_PER_DAY),
            Unit::Month | Unit::Year | Unit::Century => None,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Unit {
    type Err = TemporalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Unit::ALL
            .into_iter()
            .find(|u| u.name() == s)
            .ok_or_else(|| TemporalError::Parse {
                text: s.to_string(),
                reason: "unknown unit".to_string(),
            })
    }
}

pub fn is_leap_year(year: i64) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i64, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

// Day counts relative to 1970-01-01 (after H. Hinnant's civil-date algorithms).
fn days_from_civil(year: i64, month: u32, day: u32) -> i64 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let m = month as i64;
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + day as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(days: i64) -> (i64, u32, u32) {
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let month = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    let year = yoe + era * 400 + i64::from(month <= 2);
    (year, month, day)
}

/// A point on the timeline at second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn new(
        year: i64,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
    ) -> Result<Self, TemporalError> {
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Err(TemporalError::InvalidDate(format!(
                "year {year} outside {MIN_YEAR}..={MAX_YEAR}"
            )));
        }
        if !(1..=12).contains(&month) {
            return Err(TemporalError::InvalidDate(format!("month {month}")));
        }
        if day == 0 || day > days_in_month(year, month) {
            return Err(TemporalError::InvalidDate(format!(
                "day {day} in {year:04}-{month:02}"
            )));
        }
        if hour > 23 || minute > 59 || second > 59 {
            return Err(TemporalError::InvalidDate(format!(
                "time {hour:02}:{minute:02}:{second:02}"
            )));
        }
        let days = days_from_civil(year, month, day);
        Ok(Timestamp(
            days * SECONDS_PER_DAY
                + hour as i64 * SECONDS_PER_HOUR
                + minute as i64 * SECONDS_PER_MINUTE
                + second as i64,
        ))
    }

    pub fn from_ymd(year: i64, month: u32, day: u32) -> Result<Self, TemporalError> {
        Self::new(year, month, day, 0, 0, 0)
    }

    /// Seconds since 1970-01-01T00:00:00.
    pub fn epoch_seconds(self) -> i64 {
        self.0
    }

    pub fn from_epoch_seconds(seconds: i64) -> Result<Self, TemporalError> {
        let (year, _, _) = civil_from_days(seconds.div_euclid(SECONDS_PER_DAY));
        if (MIN_YEAR..=MAX_YEAR).contains(&year) {
            Ok(Timestamp(seconds))
        } else {
            Err(TemporalError::OutOfRange)
        }
    }

    fn days(self) -> i64 {
        self.0.div_euclid(SECONDS_PER_DAY)
    }

    fn seconds_of_day(self) -> i64 {
        self.0.rem_euclid(SECONDS_PER_DAY)
    }

    pub fn year(self) -> i64 {
        civil_from_days(self.days()).0
    }

    pub fn month(self) -> u32 {
        civil_from_days(self.days()).1
    }

    pub fn day(self) -> u32 {
        civil_from_days(self.days()).2
    }

    pub fn hour(self) -> u32 {
        (self.seconds_of_day() / SECONDS_PER_HOUR) as u32
    }

    pub fn minute(self) -> u32 {
        (self.seconds_of_day() % SECONDS_PER_HOUR / SECONDS_PER_MINUTE) as u32
    }

    pub fn second(self) -> u32 {
        (self.seconds_of_day() % SECONDS_PER_MINUTE) as u32
    }

    /// Day of week with Monday = 0 through Sunday = 6.
    pub fn weekday(self) -> u32 {
        // 1970-01-01 was a Thursday.
        (self.days() + 3).rem_euclid(7) as u32
    }

    /// Largest unit-aligned timestamp not after `self`. Weeks start on Monday.
    pub fn truncate(self, unit: Unit) -> Timestamp {
        let day_start = self.days() * SECONDS_PER_DAY;
        let (year, month, _) = civil_from_days(self.days());
        let start_of = |y: i64, m: u32| Timestamp(days_from_civil(y, m, 1) * SECONDS_PER_DAY);
        match unit {
            Unit::Second => self,
            Unit::Minute => Timestamp(self.0 - self.0.rem_euclid(SECONDS_PER_MINUTE)),
            Unit::Hour => Timestamp(self.0 - self.0.rem_euclid(SECONDS_PER_HOUR)),
            Unit::Day => Timestamp(day_start),
            Unit::Week => Timestamp(day_start - self.weekday() as i64 * SECONDS_PER_DAY),
            Unit::Month => start_of(year, month),
            Unit::Year => start_of(year, 1),
            Unit::Century => start_of(year.div_euclid(100) * 100, 1),
        }
    }

    /// Moves `n` units along the timeline. Month-based units clamp the day of
    /// month to the length of the target month.
    pub fn advance(self, unit: Unit, n: i64) -> Result<Timestamp, TemporalError> {
        if let Some(len) = unit.fixed_seconds() {
            let delta = n.checked_mul(len).ok_or(TemporalError::OutOfRange)?;
            let target = self.0.checked_add(delta).ok_or(TemporalError::OutOfRange)?;
            return Timestamp::from_epoch_seconds(target);
        }
        let months = match unit {
            Unit::Month => n,
            Unit::Year => n.checked_mul(12).ok_or(TemporalError::OutOfRange)?,
            Unit::Century => n.checked_mul(1200).ok_or(TemporalError::OutOfRange)?,
            _ => unreachable!("fixed-length units handled above"),
        };
        let (year, month, day) = civil_from_days(self.days());
        let total = (year * 12 + (month as i64 - 1))
            .checked_add(months)
            .ok_or(TemporalError::OutOfRange)?;
        let new_year = total.div_euclid(12);
        if !(MIN_YEAR..=MAX_YEAR).contains(&new_year) {
            return Err(TemporalError::OutOfRange);
        }
        let new_month = total.rem_euclid(12) as u32 + 1;
        let new_day = day.min(days_in_month(new_year, new_month));
        Ok(Timestamp(
            days_from_civil(new_year, new_month, new_day) * SECONDS_PER_DAY
                + self.seconds_of_day(),
        ))
    }

    /// Adds a raw number of seconds.
    pub fn add_seconds(self, seconds: i64) -> Result<Timestamp, TemporalError> {
        self.advance(Unit::Second, seconds)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = civil_from_days(self.days());
        write!(
            f,
            "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}",
            self.hour(),
            self.minute(),
            self.second()
        )
    }
}

impl FromStr for Timestamp {
    type Err = TemporalError;

    /// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM` or `YYYY-MM-DDTHH:MM:SS`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| TemporalError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let (date, time) = match s.split_once('T') {
            Some((d, t)) => (d, Some(t)),
            None => (s, None),
        };
        let number = |part: &str, width: usize| -> Result<u32, TemporalError> {
            if part.len() != width || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(fail("expected YYYY-MM-DDTHH:MM:SS"));
            }
            part.parse().map_err(|_| fail("bad number"))
        };
        let mut date_parts = date.split('-');
        let (Some(y), Some(m), Some(d), None) = (
            date_parts.next(),
            date_parts.next(),
            date_parts.next(),
            date_parts.next(),
        ) else {
            return Err(fail("expected YYYY-MM-DD date"));
        };
        let (year, month, day) = (number(y, 4)?, number(m, 2)?, number(d, 2)?);
        let (hour, minute, second) = match time {
            None => (0, 0, 0),
            Some(t) => {
                let parts: Vec<&str> = t.split(':').collect();
                match parts.as_slice() {
                    [h, mi] => (number(h, 2)?, number(mi, 2)?, 0),
                    [h, mi, sec] => (number(h, 2)?, number(mi, 2)?, number(sec, 2)?),
                    _ => return Err(fail("expected HH:MM[:SS] time")),
                }
            }
        };
        Timestamp::new(year as i64, month, day, hour, minute, second)
    }
}

/// A half-open span `[start, end)`; a missing endpoint is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    start: Option<Timestamp>,
    end: Option<Timestamp>,
}

impl Interval {
    pub fn new(start: Option<Timestamp>, end: Option<Timestamp>) -> Result<Self, TemporalError> {
        if let (Some(s), Some(e)) = (start, end) {
            if s >= e {
                return Err(TemporalError::Ordering {
                    start: s.to_string(),
                    end: e.to_string(),
                });
            }
        }
        Ok(Interval { start, end })
    }

    pub fn bounded(start: Timestamp, end: Timestamp) -> Result<Self, TemporalError> {
        Self::new(Some(start), Some(end))
    }

    /// The calendar unit named by a prefix of `[year, month, day, hour,
    /// minute, second]`, at the granularity of the last supplied component.
    pub fn of(components: &[i64]) -> Result<Self, TemporalError> {
        const UNITS: [Unit; 6] = [
            Unit::Year,
            Unit::Month,
            Unit::Day,
            Unit::Hour,
            Unit::Minute,
            Unit::Second,
        ];
        if components.is_empty() || components.len() > UNITS.len() {
            return Err(TemporalError::InvalidDate(format!(
                "expected 1 to 6 date components, got {}",
                components.len()
            )));
        }
        let part = |i: usize, default: u32| -> Result<u32, TemporalError> {
            match components.get(i) {
                None => Ok(default),
                Some(&v) => u32::try_from(v)
                    .map_err(|_| TemporalError::InvalidDate(format!("component {v}"))),
            }
        };
        let start = Timestamp::new(
            components[0],
            part(1, 1)?,
            part(2, 1)?,
            part(3, 0)?,
            part(4, 0)?,
            part(5, 0)?,
        )?;
        let end = start.advance(UNITS[components.len() - 1], 1)?;
        Interval::bounded(start, end)
    }

    /// Parses `"<start> <end>"`, where either side may be `...`.
    pub fn from_iso(text: &str) -> Result<Self, TemporalError> {
        let fail = |reason: &str| TemporalError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut parts = text.split(' ');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(fail("expected two endpoints separated by one space"));
        };
        let endpoint = |s: &str| -> Result<Option<Timestamp>, TemporalError> {
            if s == UNBOUNDED {
                Ok(None)
            } else {
                s.parse().map(Some)
            }
        };
        Interval::new(endpoint(a)?, endpoint(b)?)
    }

    pub fn start(&self) -> Option<Timestamp> {
        self.start
    }

    pub fn end(&self) -> Option<Timestamp> {
        self.end
    }

    pub fn is_bounded(&self) -> bool {
        self.start.is_some() && self.end.is_some()
    }

    /// Overlap with absent starts as -inf and absent ends as +inf.
    pub fn overlap(&self, other: &Interval) -> Option<Interval> {
        let start = match (self.start, other.start) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let end = match (self.end, other.end) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Interval::new(start, end).ok()
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Interval) -> bool {
        let starts_ok = match (self.start, other.start) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let ends_ok = match (self.end, other.end) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        starts_ok && ends_ok
    }

    /// Orders by start (unbounded first), then by end (unbounded last).
    pub fn timeline_cmp(&self, other: &Interval) -> Ordering {
        let start = match (self.start, other.start) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(&b),
        };
        start.then_with(|| match (self.end, other.end) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(&b),
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.start {
            Some(s) => write!(f, "{s}")?,
            None => f.write_str(UNBOUNDED)?,
        }
        f.write_str(" ")?;
        match self.end {
            Some(e) => write!(f, "{e}"),
            None => f.write_str(UNBOUNDED),
        }
    }
}

impl FromStr for Interval {
    type Err = TemporalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Interval::from_iso(s)
    }
}
