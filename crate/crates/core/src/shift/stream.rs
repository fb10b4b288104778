use std::iter::Peekable;

use super::{Direction, Shift, ShiftError};
use crate::temporal::{Interval, TemporalError, Timestamp};

/// A lazy, owned stream of bounded instances.
pub type Instances = Box<dyn Iterator<Item = Interval> + Send>;

/// Consecutive candidates a `RepeatingIntersection` stream may reject before
/// it gives up and ends.
pub const INTERSECTION_SCAN_LIMIT: usize = 10_000;

fn start_of(i: &Interval) -> Timestamp {
    i.start().expect("stream instances are bounded")
}

fn end_of(i: &Interval) -> Timestamp {
    i.end().expect("stream instances are bounded")
}

fn base_instance(shift: &Shift, range_start: Timestamp) -> Result<Option<Interval>, TemporalError> {
    match shift {
        Shift::Repeating(r) => r.instance_in_range(range_start),
        Shift::Named(n) => n.instance_in_range(range_start).map(Some),
        _ => unreachable!("only Repeating and named repeatings are walked by range"),
    }
}

/// Walks range instances (years for "February", weeks for "Monday", ...)
/// and picks the instance inside each one.
fn calendar_walk(shift: &Shift, anchor: Timestamp, direction: Direction) -> Instances {
    let range = shift.range_unit().expect("repeating shifts have a range");
    let step = match direction {
        Direction::Forward => 1,
        Direction::Backward => -1,
    };
    let shift = shift.clone();
    let mut cursor = Some(anchor.truncate(range));
    Box::new(std::iter::from_fn(move || loop {
        let range_start = cursor?;
        cursor = range_start.advance(range, step).ok();
        match base_instance(&shift, range_start) {
            Ok(Some(i)) => {
                let keep = match direction {
                    Direction::Forward => start_of(&i) >= anchor,
                    Direction::Backward => end_of(&i) <= anchor,
                };
                if keep {
                    return Some(i);
                }
            }
            Ok(None) => {}
            Err(_) => {
                cursor = None;
                return None;
            }
        }
    }))
}

/// Contiguous period-length chunks leading away from the anchor.
fn period_chunks(shift: &Shift, anchor: Timestamp, direction: Direction) -> Result<Instances, ShiftError> {
    // Surfaces the unanchorable error before any instance is requested.
    shift.apply_period(anchor, direction, 0)?;
    let shift = shift.clone();
    let mut k: i64 = 0;
    let mut done = false;
    Ok(Box::new(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let near = shift.apply_period(anchor, direction, k);
        let far = shift.apply_period(anchor, direction, k + 1);
        k += 1;
        let chunk = match (near, far, direction) {
            (Ok(a), Ok(b), Direction::Forward) => Interval::bounded(a, b).ok(),
            (Ok(a), Ok(b), Direction::Backward) => Interval::bounded(b, a).ok(),
            _ => None,
        };
        done = chunk.is_none();
        chunk
    })))
}

/// Sorted merge of component streams, dropping repeated instances.
struct Merge {
    streams: Vec<Peekable<Instances>>,
    direction: Direction,
    last: Option<Interval>,
}

impl Iterator for Merge {
    type Item = Interval;

    fn next(&mut self) -> Option<Interval> {
        loop {
            let direction = self.direction;
            let best = self
                .streams
                .iter_mut()
                .enumerate()
                .filter_map(|(idx, s)| s.peek().map(|i| (idx, *i)))
                .reduce(|a, b| {
                    let b_first = match direction {
                        Direction::Forward => {
                            (start_of(&b.1), end_of(&b.1)) < (start_of(&a.1), end_of(&a.1))
                        }
                        Direction::Backward => {
                            (end_of(&b.1), start_of(&b.1)) > (end_of(&a.1), start_of(&a.1))
                        }
                    };
                    if b_first {
                        b
                    } else {
                        a
                    }
                })?;
            self.streams[best.0].next();
            if self.last != Some(best.1) {
                self.last = Some(best.1);
                return Some(best.1);
            }
        }
    }
}

/// Instances of the finest component that every other component contains.
fn intersect(parts: &[Shift], anchor: Timestamp, direction: Direction) -> Result<Instances, ShiftError> {
    let finest = parts
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| p.unit())
        .map(|(idx, _)| idx)
        .expect("non-empty intersection");
    let mut candidates = directed(&parts[finest], anchor, direction)?;
    let others: Vec<Shift> = parts
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != finest)
        .map(|(_, p)| p.clone())
        .collect();
    Ok(Box::new(std::iter::from_fn(move || {
        candidates
            .by_ref()
            .take(INTERSECTION_SCAN_LIMIT)
            .find(|c| others.iter().all(|o| o.has_instance_containing(c)))
    })))
}

fn directed(shift: &Shift, anchor: Timestamp, direction: Direction) -> Result<Instances, ShiftError> {
    match shift {
        Shift::Period(_) | Shift::PeriodSum(_) => period_chunks(shift, anchor, direction),
        Shift::Repeating(_) | Shift::Named(_) => Ok(calendar_walk(shift, anchor, direction)),
        Shift::Union(parts) => {
            let streams = parts
                .iter()
                .map(|p| directed(p, anchor, direction).map(Iterator::peekable))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Box::new(Merge {
                streams,
                direction,
                last: None,
            }))
        }
        Shift::Intersection(parts) => intersect(parts, anchor, direction),
    }
}

pub(super) fn following(shift: &Shift, anchor: Timestamp) -> Result<Instances, ShiftError> {
    directed(shift, anchor, Direction::Forward)
}

pub(super) fn preceding(shift: &Shift, anchor: Timestamp) -> Result<Instances, ShiftError> {
    directed(shift, anchor, Direction::Backward)
}
