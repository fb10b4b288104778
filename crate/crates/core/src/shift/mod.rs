//! Shifts: timeline-independent periods and calendar-anchored repeating
//! intervals.
//!
//! Every anchorable shift exposes two lazy instance streams around an anchor
//! timestamp. [`Shift::following`] yields instances starting at or after the
//! anchor in increasing order; [`Shift::preceding`] yields instances ending at
//! or before the anchor, most recent first. An instance that strictly contains
//! the anchor belongs to neither stream.

mod stream;

use std::fmt;

use thiserror::Error;

use crate::temporal::{days_in_month, Interval, TemporalError, Timestamp, Unit};

pub use stream::{Instances, INTERSECTION_SCAN_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("invalid shift: {0}")]
    Invalid(String),
    #[error("cannot anchor {0} on the timeline")]
    Unanchorable(String),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Backward,
    Forward,
}

impl Direction {
    fn sign(self) -> i64 {
        match self {
            Direction::Backward => -1,
            Direction::Forward => 1,
        }
    }
}

/// A count of calendar units. A missing count stands for an unspecified
/// amount ("recent years").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Period {
    unit: Unit,
    count: Option<i64>,
}

impl Period {
    pub fn new(unit: Unit, count: Option<i64>) -> Result<Self, ShiftError> {
        if let Some(n) = count {
            if n < 1 {
                return Err(ShiftError::Invalid(format!("period count must be >= 1, got {n}")));
            }
        }
        Ok(Period { unit, count })
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn count(&self) -> Option<i64> {
        self.count
    }
}

/// Index range accepted by `Repeating(unit, range, value=...)` for each
/// supported unit pair.
pub fn repeating_value_range(unit: Unit, range: Unit) -> Option<(i64, i64)> {
    match (unit, range) {
        (Unit::Month, Unit::Year) => Some((1, 12)),
        (Unit::Day, Unit::Week) => Some((0, 6)),
        (Unit::Day, Unit::Month) => Some((1, 31)),
        (Unit::Hour, Unit::Day) => Some((0, 23)),
        _ => None,
    }
}

/// A calendar-anchored recurrence: every `unit` (when `value` is absent) or
/// the `value`-th `unit` within each `range` ("February" is month 2 of each
/// year, "Thursday" is day 3 of each week with Monday = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Repeating {
    unit: Unit,
    range: Unit,
    value: Option<i64>,
}

impl Repeating {
    pub fn new(unit: Unit, range: Option<Unit>, value: Option<i64>) -> Result<Self, ShiftError> {
        let range = range.unwrap_or(unit);
        if unit > range {
            return Err(ShiftError::Invalid(format!(
                "repeating unit {unit} is coarser than its range {range}"
            )));
        }
        match value {
            None if range != unit => Err(ShiftError::Invalid(format!(
                "Repeating({unit}, {range}) needs a value"
            ))),
            None => Ok(Repeating { unit, range, value }),
            Some(v) => {
                let (lo, hi) = repeating_value_range(unit, range).ok_or_else(|| {
                    ShiftError::Invalid(format!("unsupported unit pair ({unit}, {range})"))
                })?;
                if !(lo..=hi).contains(&v) {
                    return Err(ShiftError::Invalid(format!(
                        "value {v} outside {lo}..={hi} for ({unit}, {range})"
                    )));
                }
                Ok(Repeating { unit, range, value })
            }
        }
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn range(&self) -> Unit {
        self.range
    }

    pub fn value(&self) -> Option<i64> {
        self.value
    }

    /// The instance belonging to the range instance starting at `range_start`,
    /// if that range has one.
    fn instance_in_range(&self, range_start: Timestamp) -> Result<Option<Interval>, TemporalError> {
        let start = match (self.value, self.unit, self.range) {
            (None, _, _) => range_start,
            (Some(v), Unit::Month, Unit::Year) => range_start.advance(Unit::Month, v - 1)?,
            (Some(v), Unit::Day, Unit::Week) => range_start.advance(Unit::Day, v)?,
            (Some(v), Unit::Hour, Unit::Day) => range_start.advance(Unit::Hour, v)?,
            (Some(v), Unit::Day, Unit::Month) => {
                if v > days_in_month(range_start.year(), range_start.month()) as i64 {
                    return Ok(None);
                }
                range_start.advance(Unit::Day, v - 1)?
            }
            (Some(_), unit, range) => unreachable!("validated unit pair ({unit}, {range})"),
        };
        Ok(Some(Interval::bounded(start, start.advance(self.unit, 1)?)?))
    }
}

/// Seasons and parts of the day.
///
/// | name      | span                            |
/// |-----------|---------------------------------|
/// | Spring    | Mar 1 – Jun 1                   |
/// | Summer    | Jun 1 – Sep 1                   |
/// | Fall      | Sep 1 – Dec 1                   |
/// | Winter    | Dec 1 – Mar 1 (of the next year)|
/// | Morning   | 06:00 – 12:00                   |
/// | Noon      | 12:00 – 12:01                   |
/// | Afternoon | 12:00 – 18:00                   |
/// | Evening   | 18:00 – 21:00                   |
/// | Night     | 21:00 – 24:00                   |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedRepeating {
    Spring,
    Summer,
    Fall,
    Winter,
    Morning,
    Noon,
    Afternoon,
    Evening,
    Night,
}

impl NamedRepeating {
    pub const ALL: [NamedRepeating; 9] = [
        NamedRepeating::Spring,
        NamedRepeating::Summer,
        NamedRepeating::Fall,
        NamedRepeating::Winter,
        NamedRepeating::Morning,
        NamedRepeating::Noon,
        NamedRepeating::Afternoon,
        NamedRepeating::Evening,
        NamedRepeating::Night,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedRepeating::Spring => "Spring",
            NamedRepeating::Summer => "Summer",
            NamedRepeating::Fall => "Fall",
            NamedRepeating::Winter => "Winter",
            NamedRepeating::Morning => "Morning",
            NamedRepeating::Noon => "Noon",
            NamedRepeating::Afternoon => "Afternoon",
            NamedRepeating::Evening => "Evening",
            NamedRepeating::Night => "Night",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.name() == name)
    }

    pub fn range(self) -> Unit {
        if self.is_season() {
            Unit::Year
        } else {
            Unit::Day
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            n if n.is_season() => Unit::Month,
            NamedRepeating::Noon => Unit::Minute,
            _ => Unit::Hour,
        }
    }

    fn is_season(self) -> bool {
        matches!(
            self,
            NamedRepeating::Spring
                | NamedRepeating::Summer
                | NamedRepeating::Fall
                | NamedRepeating::Winter
        )
    }

    /// Offsets from the start of the enclosing range: whole months for
    /// seasons, minutes for parts of the day.
    fn offsets(self) -> (i64, i64) {
        match self {
            NamedRepeating::Spring => (2, 5),
            NamedRepeating::Summer => (5, 8),
            NamedRepeating::Fall => (8, 11),
            NamedRepeating::Winter => (11, 14),
            NamedRepeating::Morning => (6 * 60, 12 * 60),
            NamedRepeating::Noon => (12 * 60, 12 * 60 + 1),
            NamedRepeating::Afternoon => (12 * 60, 18 * 60),
            NamedRepeating::Evening => (18 * 60, 21 * 60),
            NamedRepeating::Night => (21 * 60, 24 * 60),
        }
    }

    fn instance_in_range(self, range_start: Timestamp) -> Result<Interval, TemporalError> {
        let step = if self.is_season() { Unit::Month } else { Unit::Minute };
        let (from, to) = self.offsets();
        Interval::bounded(range_start.advance(step, from)?, range_start.advance(step, to)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shift {
    Period(Period),
    PeriodSum(Vec<Period>),
    Repeating(Repeating),
    Named(NamedRepeating),
    Union(Vec<Shift>),
    Intersection(Vec<Shift>),
}

impl Shift {
    pub fn period_sum(parts: Vec<Period>) -> Result<Shift, ShiftError> {
        if parts.len() < 2 {
            return Err(ShiftError::Invalid("PeriodSum needs at least two periods".into()));
        }
        Ok(Shift::PeriodSum(parts))
    }

    pub fn union(parts: Vec<Shift>) -> Result<Shift, ShiftError> {
        if parts.len() < 2 {
            return Err(ShiftError::Invalid("ShiftUnion needs at least two shifts".into()));
        }
        if let Some(p) = parts.iter().find(|s| s.is_period()) {
            return Err(ShiftError::Invalid(format!(
                "ShiftUnion combines repeating intervals, not {p}"
            )));
        }
        Ok(Shift::Union(parts))
    }

    pub fn intersection(parts: Vec<Shift>) -> Result<Shift, ShiftError> {
        if parts.len() < 2 {
            return Err(ShiftError::Invalid(
                "RepeatingIntersection needs at least two repeatings".into(),
            ));
        }
        if let Some(p) = parts
            .iter()
            .find(|s| !matches!(s, Shift::Repeating(_) | Shift::Named(_)))
        {
            return Err(ShiftError::Invalid(format!(
                "RepeatingIntersection accepts Repeating or named repeatings, not {p}"
            )));
        }
        Ok(Shift::Intersection(parts))
    }

    /// Periods are timeline-independent amounts of time.
    pub fn is_period(&self) -> bool {
        matches!(self, Shift::Period(_) | Shift::PeriodSum(_))
    }

    pub fn is_repeating(&self) -> bool {
        !self.is_period()
    }

    /// Granularity of a single instance. For unions and intersections this is
    /// the finest component unit.
    pub fn unit(&self) -> Unit {
        match self {
            Shift::Period(p) => p.unit,
            Shift::PeriodSum(ps) => ps.iter().map(|p| p.unit).min().expect("non-empty"),
            Shift::Repeating(r) => r.unit,
            Shift::Named(n) => n.unit(),
            Shift::Union(parts) | Shift::Intersection(parts) => {
                parts.iter().map(Shift::unit).min().expect("non-empty")
            }
        }
    }

    /// Calendar unit inside which a repeating selects its instance; the
    /// coarsest component range for unions and intersections.
    pub fn range_unit(&self) -> Option<Unit> {
        match self {
            Shift::Period(_) | Shift::PeriodSum(_) => None,
            Shift::Repeating(r) => Some(r.range),
            Shift::Named(n) => Some(n.range()),
            Shift::Union(parts) | Shift::Intersection(parts) => {
                parts.iter().filter_map(Shift::range_unit).max()
            }
        }
    }

    /// Whether some instance of a Repeating or named repeating contains `span`.
    pub(crate) fn has_instance_containing(&self, span: &Interval) -> bool {
        let Some(start) = span.start() else {
            return false;
        };
        match self {
            Shift::Repeating(r) => {
                let range_start = start.truncate(r.range);
                matches!(r.instance_in_range(range_start), Ok(Some(i)) if i.contains(span))
            }
            Shift::Named(n) => {
                let range_start = start.truncate(n.range());
                [Ok(range_start), range_start.advance(n.range(), -1)]
                    .into_iter()
                    .filter_map(Result::ok)
                    .filter_map(|r| n.instance_in_range(r).ok())
                    .any(|i| i.contains(span))
            }
            Shift::Union(parts) => parts.iter().any(|p| p.has_instance_containing(span)),
            Shift::Intersection(parts) => parts.iter().all(|p| p.has_instance_containing(span)),
            Shift::Period(_) | Shift::PeriodSum(_) => false,
        }
    }

    /// Components of a period-like shift; errors when any count is missing.
    fn period_parts(&self) -> Result<&[Period], ShiftError> {
        let parts = match self {
            Shift::Period(p) => std::slice::from_ref(p),
            Shift::PeriodSum(ps) => ps.as_slice(),
            other => return Err(ShiftError::Invalid(format!("{other} is not a period"))),
        };
        if parts.iter().any(|p| p.count.is_none()) {
            return Err(ShiftError::Unanchorable(self.to_string()));
        }
        Ok(parts)
    }

    /// Moves `ts` by `times` applications of a period or period sum,
    /// applying the components in order.
    pub fn apply_period(
        &self,
        ts: Timestamp,
        direction: Direction,
        times: i64,
    ) -> Result<Timestamp, ShiftError> {
        let mut out = ts;
        for p in self.period_parts()? {
            let count = p.count.expect("checked by period_parts");
            let n = count
                .checked_mul(times)
                .and_then(|n| n.checked_mul(direction.sign()))
                .ok_or(TemporalError::OutOfRange)?;
            out = out.advance(p.unit, n)?;
        }
        Ok(out)
    }

    /// Instances starting at or after `anchor`, in increasing order.
    pub fn following(&self, anchor: Timestamp) -> Result<Instances, ShiftError> {
        stream::following(self, anchor)
    }

    /// Instances ending at or before `anchor`, most recent first.
    pub fn preceding(&self, anchor: Timestamp) -> Result<Instances, ShiftError> {
        stream::preceding(self, anchor)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = String>) -> fmt::Result {
    f.write_str("[")?;
    f.write_str(&items.collect::<Vec<_>>().join(", "))?;
    f.write_str("]")
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.count {
            Some(n) => write!(f, "Period({}, {n})", self.unit),
            None => write!(f, "Period({}, None)", self.unit),
        }
    }
}

impl fmt::Display for Repeating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            None => write!(f, "Repeating({})", self.unit),
            Some(v) => write!(f, "Repeating({}, {}, value={v})", self.unit, self.range),
        }
    }
}

/// Canonical expression-language text of the shift.
impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::Period(p) => write!(f, "{p}"),
            Shift::PeriodSum(ps) => {
                f.write_str("PeriodSum(")?;
                write_list(f, ps.iter().map(Period::to_string))?;
                f.write_str(")")
            }
            Shift::Repeating(r) => write!(f, "{r}"),
            Shift::Named(n) => write!(f, "{}()", n.name()),
            Shift::Union(parts) => {
                f.write_str("ShiftUnion(")?;
                write_list(f, parts.iter().map(Shift::to_string))?;
                f.write_str(")")
            }
            Shift::Intersection(parts) => {
                f.write_str("RepeatingIntersection(")?;
                write_list(f, parts.iter().map(Shift::to_string))?;
                f.write_str(")")
            }
        }
    }
}
