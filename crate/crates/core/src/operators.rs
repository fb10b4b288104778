//! Temporal operators: positional (`Last`, `Next`, `Before`, `After`),
//! selection (`Nth`, `This`), range (`Between`, `Intersection`) and
//! collection (`These`, `LastN`, `NextN`).
//!
//! Operators that walk instance streams draw from a shared [`Budget`] so that
//! pathological expressions fail with [`OpError::OutOfRange`] instead of
//! scanning forever.

use thiserror::Error;

use crate::shift::{Direction, Instances, Shift, ShiftError};
use crate::temporal::{Interval, TemporalError, Timestamp};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("{0}")]
    Precondition(String),
    #[error("ambiguous: {0}")]
    Ambiguous(String),
    #[error("intervals do not intersect")]
    EmptyIntersection,
    #[error("{0}")]
    OutOfRange(String),
    #[error("cannot anchor {0} on the timeline")]
    Unanchorable(String),
    #[error("{0}")]
    InvalidArgument(String),
}

impl From<ShiftError> for OpError {
    fn from(e: ShiftError) -> Self {
        match e {
            ShiftError::Invalid(msg) => OpError::InvalidArgument(msg),
            ShiftError::Unanchorable(what) => OpError::Unanchorable(what),
            ShiftError::Temporal(t) => t.into(),
        }
    }
}

impl From<TemporalError> for OpError {
    fn from(e: TemporalError) -> Self {
        match e {
            TemporalError::OutOfRange => OpError::OutOfRange(e.to_string()),
            TemporalError::Ordering { .. } => OpError::Precondition(e.to_string()),
            other => OpError::InvalidArgument(other.to_string()),
        }
    }
}

/// The result of evaluating a complete expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizedValue {
    Interval(Interval),
    Intervals(Vec<Interval>),
    /// A bare `Period` or `PeriodSum`.
    Period(Shift),
    /// A bare repeating interval, union or intersection.
    Repeating(Shift),
}

/// Number of stream instances an evaluation may consume.
#[derive(Debug, Clone)]
pub struct Budget {
    remaining: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget { remaining: limit }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Pulls the next instance, charging one unit.
    fn pull(&mut self, stream: &mut Instances) -> Result<Option<Interval>, OpError> {
        if self.remaining == 0 {
            return Err(OpError::OutOfRange("instance budget exhausted".into()));
        }
        self.remaining -= 1;
        Ok(stream.next())
    }

    fn nth(&mut self, stream: &mut Instances, n: i64) -> Result<Interval, OpError> {
        let mut last = None;
        for _ in 0..n {
            last = self.pull(stream)?;
            if last.is_none() {
                break;
            }
        }
        last.ok_or_else(|| OpError::OutOfRange("no matching instance on the timeline".into()))
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

fn start_of(anchor: &Interval, op: &str) -> Result<Timestamp, OpError> {
    anchor
        .start()
        .ok_or_else(|| OpError::Precondition(format!("{op} needs an anchor with a start")))
}

fn end_of(anchor: &Interval, op: &str) -> Result<Timestamp, OpError> {
    anchor
        .end()
        .ok_or_else(|| OpError::Precondition(format!("{op} needs an anchor with an end")))
}

fn bounds(anchor: &Interval, op: &str) -> Result<(Timestamp, Timestamp), OpError> {
    match (anchor.start(), anchor.end()) {
        (Some(s), Some(e)) => Ok((s, e)),
        _ => Err(OpError::Precondition(format!("{op} needs a bounded anchor"))),
    }
}

fn positive(n: i64, what: &str) -> Result<(), OpError> {
    if n < 1 {
        return Err(OpError::Precondition(format!("{what} must be >= 1, got {n}")));
    }
    Ok(())
}

fn repeating_only(shift: &Shift, op: &str) -> Result<(), OpError> {
    if shift.is_period() {
        return Err(OpError::InvalidArgument(format!(
            "{op} needs a repeating interval, got {shift}"
        )));
    }
    Ok(())
}

fn instance_start(i: &Interval) -> Timestamp {
    i.start().expect("stream instances are bounded")
}

fn instance_end(i: &Interval) -> Timestamp {
    i.end().expect("stream instances are bounded")
}

/// Closest interval ending at or before the anchor's start. Without a shift,
/// or with an unspecified period, everything before the anchor.
pub fn last(anchor: &Interval, shift: Option<&Shift>, budget: &mut Budget) -> Result<Interval, OpError> {
    let start = start_of(anchor, "Last")?;
    match shift {
        None => Ok(Interval::new(None, Some(start))?),
        Some(s) if s.is_period() => match s.apply_period(start, Direction::Backward, 1) {
            Ok(from) => Ok(Interval::bounded(from, start)?),
            Err(ShiftError::Unanchorable(_)) => Ok(Interval::new(None, Some(start))?),
            Err(e) => Err(e.into()),
        },
        Some(s) => budget.nth(&mut s.preceding(start)?, 1),
    }
}

/// Closest interval starting at or after the anchor's end.
pub fn next(anchor: &Interval, shift: Option<&Shift>, budget: &mut Budget) -> Result<Interval, OpError> {
    let end = end_of(anchor, "Next")?;
    match shift {
        None => Ok(Interval::new(Some(end), None)?),
        Some(s) if s.is_period() => match s.apply_period(end, Direction::Forward, 1) {
            Ok(to) => Ok(Interval::bounded(end, to)?),
            Err(ShiftError::Unanchorable(_)) => Ok(Interval::new(Some(end), None)?),
            Err(e) => Err(e.into()),
        },
        Some(s) => budget.nth(&mut s.following(end)?, 1),
    }
}

/// Moves both endpoints. When month clamping folds the end onto the start
/// (Oct 30 to Oct 31, plus one month), the original width is kept instead.
fn translate(anchor: &Interval, shift: &Shift, direction: Direction, n: i64, op: &str) -> Result<Interval, OpError> {
    let (s, e) = bounds(anchor, op)?;
    let start = shift.apply_period(s, direction, n)?;
    let mut end = shift.apply_period(e, direction, n)?;
    if end <= start {
        end = start.add_seconds(e.epoch_seconds() - s.epoch_seconds())?;
    }
    Ok(Interval::bounded(start, end)?)
}

/// Moves the anchor back by `n` periods, or selects the `n`-th repeating
/// instance before it.
pub fn before(anchor: &Interval, shift: &Shift, n: i64, budget: &mut Budget) -> Result<Interval, OpError> {
    positive(n, "Before n")?;
    if shift.is_period() {
        return translate(anchor, shift, Direction::Backward, n, "Before");
    }
    let start = start_of(anchor, "Before")?;
    budget.nth(&mut shift.preceding(start)?, n)
}

/// Moves the anchor forward by `n` periods, or selects the `n`-th repeating
/// instance after it.
pub fn after(anchor: &Interval, shift: &Shift, n: i64, budget: &mut Budget) -> Result<Interval, OpError> {
    positive(n, "After n")?;
    if shift.is_period() {
        return translate(anchor, shift, Direction::Forward, n, "After");
    }
    let end = end_of(anchor, "After")?;
    budget.nth(&mut shift.following(end)?, n)
}

/// The `index`-th (1-based) instance inside the anchor, counted from its
/// start or, with `from_end`, from its end.
pub fn nth(
    anchor: &Interval,
    shift: &Shift,
    index: i64,
    from_end: bool,
    budget: &mut Budget,
) -> Result<Interval, OpError> {
    positive(index, "Nth index")?;
    let (s, e) = bounds(anchor, "Nth")?;
    let out_of_range = || OpError::OutOfRange(format!("fewer than {index} instances of {shift} in {anchor}"));
    if shift.is_period() {
        let chunk = if from_end {
            Interval::bounded(
                shift.apply_period(e, Direction::Backward, index)?,
                shift.apply_period(e, Direction::Backward, index - 1)?,
            )?
        } else {
            Interval::bounded(
                shift.apply_period(s, Direction::Forward, index - 1)?,
                shift.apply_period(s, Direction::Forward, index)?,
            )?
        };
        return if anchor.contains(&chunk) {
            Ok(chunk)
        } else {
            Err(out_of_range())
        };
    }
    let mut seen = 0;
    if from_end {
        let mut stream = shift.preceding(e)?;
        while let Some(inst) = budget.pull(&mut stream)? {
            if instance_end(&inst) <= s {
                break;
            }
            if instance_start(&inst) >= s {
                seen += 1;
                if seen == index {
                    return Ok(inst);
                }
            }
        }
    } else {
        let mut stream = shift.following(s)?;
        while let Some(inst) = budget.pull(&mut stream)? {
            if instance_start(&inst) >= e {
                break;
            }
            if instance_end(&inst) <= e {
                seen += 1;
                if seen == index {
                    return Ok(inst);
                }
            }
        }
    }
    Err(out_of_range())
}

/// The current instance: the one containing the anchor if any, otherwise the
/// unique instance starting inside the range unit enclosing the anchor start
/// ("this January" said in November is January of the same year). A period
/// is centred on the anchor's midpoint.
pub fn this(anchor: &Interval, shift: &Shift, budget: &mut Budget) -> Result<Interval, OpError> {
    let (s, e) = bounds(anchor, "This")?;
    if shift.is_period() {
        let mid = s.add_seconds((e.epoch_seconds() - s.epoch_seconds()) / 2)?;
        let width = shift.apply_period(mid, Direction::Forward, 1)?.epoch_seconds() - mid.epoch_seconds();
        let start = mid.add_seconds(-(width / 2))?;
        return Ok(Interval::bounded(start, start.add_seconds(width)?)?);
    }
    if let Some(inst) = containing(anchor, shift, budget)? {
        return Ok(inst);
    }

    let range = shift.range_unit().expect("repeating shifts have a range");
    let range_start = s.truncate(range);
    let range_end = range_start.advance(range, 1)?;
    let mut stream = shift.following(range_start)?;
    let mut found = Vec::new();
    while let Some(inst) = budget.pull(&mut stream)? {
        if instance_start(&inst) >= range_end || found.len() > 1 {
            break;
        }
        found.push(inst);
    }
    match found.as_slice() {
        [only] => Ok(*only),
        [] => Err(OpError::Ambiguous(format!(
            "no instance of {shift} in the {range} around {anchor}"
        ))),
        _ => Err(OpError::Ambiguous(format!(
            "several instances of {shift} in the {range} around {anchor}"
        ))),
    }
}

/// Earliest instance containing the anchor. Union components are searched
/// separately so that a fine component is only scanned over its own range.
fn containing(anchor: &Interval, shift: &Shift, budget: &mut Budget) -> Result<Option<Interval>, OpError> {
    if let Shift::Union(parts) = shift {
        let mut best: Option<Interval> = None;
        for part in parts {
            if let Some(inst) = containing(anchor, part, budget)? {
                if best.is_none_or(|b| inst.timeline_cmp(&b).is_lt()) {
                    best = Some(inst);
                }
            }
        }
        return Ok(best);
    }
    let s = start_of(anchor, "This")?;
    let range = shift.range_unit().expect("repeating shifts have a range");
    let range_start = s.truncate(range);
    let scan_from = range_start.advance(range, -1).unwrap_or(range_start);
    let mut stream = shift.following(scan_from)?;
    while let Some(inst) = budget.pull(&mut stream)? {
        if instance_start(&inst) > s {
            break;
        }
        if inst.contains(anchor) {
            return Ok(Some(inst));
        }
    }
    Ok(None)
}

/// The span between two intervals. By default both named intervals are
/// excluded; the flags include them.
pub fn between(
    start: &Interval,
    end: &Interval,
    start_included: bool,
    end_included: bool,
) -> Result<Interval, OpError> {
    let from = if start_included { start.start() } else { start.end() };
    let to = if end_included { end.end() } else { end.start() };
    let (Some(from), Some(to)) = (from, to) else {
        return Err(OpError::Precondition("Between needs bounded boundaries".into()));
    };
    if from >= to {
        return Err(OpError::Precondition(format!(
            "Between start {from} is not before end {to}"
        )));
    }
    Ok(Interval::bounded(from, to)?)
}

/// Overlap of all intervals; unbounded endpoints act as infinities.
pub fn intersection(intervals: &[Interval]) -> Result<Interval, OpError> {
    let (first, rest) = intervals
        .split_first()
        .ok_or_else(|| OpError::Precondition("Intersection needs at least one interval".into()))?;
    rest.iter()
        .try_fold(*first, |acc, i| acc.overlap(i))
        .ok_or(OpError::EmptyIntersection)
}

/// All instances starting inside the anchor.
pub fn these(anchor: &Interval, shift: &Shift, budget: &mut Budget) -> Result<Vec<Interval>, OpError> {
    repeating_only(shift, "These")?;
    let (s, e) = bounds(anchor, "These")?;
    let mut stream = shift.following(s)?;
    let mut out = Vec::new();
    while let Some(inst) = budget.pull(&mut stream)? {
        if instance_start(&inst) >= e {
            break;
        }
        out.push(inst);
    }
    Ok(out)
}

/// The `n` instances (or contiguous period chunks) before the anchor, in
/// timeline order.
pub fn last_n(anchor: &Interval, shift: &Shift, n: i64, budget: &mut Budget) -> Result<Vec<Interval>, OpError> {
    positive(n, "LastN n")?;
    let start = start_of(anchor, "LastN")?;
    let mut out = take_n(shift.preceding(start)?, n, budget)?;
    out.reverse();
    Ok(out)
}

/// The `n` instances (or contiguous period chunks) after the anchor.
pub fn next_n(anchor: &Interval, shift: &Shift, n: i64, budget: &mut Budget) -> Result<Vec<Interval>, OpError> {
    positive(n, "NextN n")?;
    let end = end_of(anchor, "NextN")?;
    take_n(shift.following(end)?, n, budget)
}

fn take_n(mut stream: Instances, n: i64, budget: &mut Budget) -> Result<Vec<Interval>, OpError> {
    let mut out = Vec::new();
    while (out.len() as i64) < n {
        match budget.pull(&mut stream)? {
            Some(i) => out.push(i),
            None => return Err(OpError::OutOfRange(format!("fewer than {n} instances available"))),
        }
    }
    Ok(out)
}
