//! Brute-force reference implementation built on chrono. Instances are found
//! by walking the calendar one day (or month, or year) at a time and testing
//! each candidate against the definition of the shift, independently of the
//! jump-based streams in the library.

#![allow(dead_code)]

use chrono::{Datelike, Duration, Months, NaiveDate, NaiveDateTime, Timelike};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use scate::{dsl, Interval, NormalizedValue, Shift, Timestamp, Unit};

pub type Span = (NaiveDateTime, NaiveDateTime);

pub fn ndt(y: i32, m: u32, d: u32, h: u32, mi: u32, s: u32) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(y, m, d).unwrap().and_hms_opt(h, mi, s).unwrap()
}

pub fn from_ts(ts: Timestamp) -> NaiveDateTime {
    chrono::DateTime::from_timestamp(ts.epoch_seconds(), 0).unwrap().naive_utc()
}

pub fn to_ts(t: NaiveDateTime) -> Timestamp {
    Timestamp::new(
        t.year() as i64,
        t.month(),
        t.day(),
        t.hour(),
        t.minute(),
        t.second(),
    )
    .unwrap()
}

pub fn span(i: &Interval) -> Span {
    (from_ts(i.start().unwrap()), from_ts(i.end().unwrap()))
}

pub fn render(s: &Span) -> String {
    format!("{} {}", s.0.format("%Y-%m-%dT%H:%M:%S"), s.1.format("%Y-%m-%dT%H:%M:%S"))
}

fn in_domain(t: NaiveDateTime) -> bool {
    (0..=9999).contains(&t.year())
}

fn unit_seconds(u: Unit) -> Option<i64> {
    match u {
        Unit::Second => Some(1),
        Unit::Minute => Some(60),
        Unit::Hour => Some(3_600),
        Unit::Day => Some(86_400),
        Unit::Week => Some(7 * 86_400),
        _ => None,
    }
}

fn unit_months(u: Unit) -> u32 {
    match u {
        Unit::Month => 1,
        Unit::Year => 12,
        Unit::Century => 1_200,
        _ => unreachable!(),
    }
}

/// `t` moved by `n` units, clamping month ends; `None` outside years 0..=9999.
pub fn advance(t: NaiveDateTime, u: Unit, n: i64) -> Option<NaiveDateTime> {
    let out = match unit_seconds(u) {
        Some(len) => t.checked_add_signed(Duration::seconds(n.checked_mul(len)?))?,
        None => {
            let months = n.checked_mul(unit_months(u) as i64)?;
            let m = Months::new(u32::try_from(months.unsigned_abs()).ok()?);
            if months >= 0 {
                t.checked_add_months(m)?
            } else {
                t.checked_sub_months(m)?
            }
        }
    };
    in_domain(out).then_some(out)
}

/// Start of the unit containing `t`, found by stepping backwards one second,
/// day or month at a time until the boundary condition holds.
pub fn truncate(t: NaiveDateTime, u: Unit) -> NaiveDateTime {
    let midnight = t.date().and_hms_opt(0, 0, 0).unwrap();
    match u {
        Unit::Second => t,
        Unit::Minute => t.with_second(0).unwrap(),
        Unit::Hour => t.with_second(0).unwrap().with_minute(0).unwrap(),
        Unit::Day => midnight,
        Unit::Week => {
            let mut d = midnight;
            while d.weekday() != chrono::Weekday::Mon {
                d -= Duration::days(1);
            }
            d
        }
        Unit::Month => {
            let mut d = midnight;
            while d.day() != 1 {
                d -= Duration::days(1);
            }
            d
        }
        Unit::Year => ndt(t.year(), 1, 1, 0, 0, 0),
        Unit::Century => ndt(t.year().div_euclid(100) * 100, 1, 1, 0, 0, 0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Period(Unit, i64),
    PeriodSum(Vec<(Unit, i64)>),
    Repeating(Unit, Unit, Option<i64>),
    Named(&'static str),
    Union(Vec<Pattern>),
    Intersection(Vec<Pattern>),
}

pub const SEASONS: [&str; 4] = ["Spring", "Summer", "Fall", "Winter"];
pub const DAY_PARTS: [&str; 5] = ["Morning", "Noon", "Afternoon", "Evening", "Night"];

fn list(items: &[Pattern]) -> String {
    items.iter().map(Pattern::expr).collect::<Vec<_>>().join(", ")
}

impl Pattern {
    pub fn expr(&self) -> String {
        match self {
            Pattern::Period(u, n) => format!("Period({u}, {n})"),
            Pattern::PeriodSum(parts) => format!(
                "PeriodSum([{}])",
                parts
                    .iter()
                    .map(|(u, n)| format!("Period({u}, {n})"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Pattern::Repeating(u, r, Some(v)) => format!("Repeating({u}, {r}, value={v})"),
            Pattern::Repeating(u, _, None) => format!("Repeating({u})"),
            Pattern::Named(n) => format!("{n}()"),
            Pattern::Union(items) => format!("ShiftUnion([{}])", list(items)),
            Pattern::Intersection(items) => format!("RepeatingIntersection([{}])", list(items)),
        }
    }

    /// The library shift, built through the expression language.
    pub fn shift(&self) -> Shift {
        match dsl::execute(&self.expr()) {
            Ok(NormalizedValue::Period(s) | NormalizedValue::Repeating(s)) => s,
            other => panic!("{} evaluated to {other:?}", self.expr()),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Pattern::Repeating(u, _, _) => u.rank(),
            Pattern::Named(n) if SEASONS.contains(n) => Unit::Month.rank(),
            Pattern::Named("Noon") => Unit::Minute.rank(),
            Pattern::Named(_) => Unit::Hour.rank(),
            Pattern::Union(items) | Pattern::Intersection(items) => items.iter().map(Pattern::rank).min().unwrap(),
            Pattern::Period(..) | Pattern::PeriodSum(_) => unreachable!(),
        }
    }

    /// Upper bound on the length of one instance.
    fn max_len(&self) -> Duration {
        match self {
            Pattern::Repeating(u, _, _) => match unit_seconds(*u) {
                Some(s) => Duration::seconds(s),
                None => Duration::days(31 * unit_months(*u) as i64 + 1),
            },
            Pattern::Named(n) if SEASONS.contains(n) => Duration::days(92),
            Pattern::Named(_) => Duration::days(1),
            Pattern::Union(items) => items.iter().map(Pattern::max_len).max().unwrap(),
            Pattern::Intersection(items) => finest(items).max_len(),
            Pattern::Period(..) | Pattern::PeriodSum(_) => unreachable!(),
        }
    }

    /// Rough gap between consecutive instances; only sizes the first search
    /// window, which grows until the answer is settled.
    fn spacing(&self) -> Duration {
        match self {
            Pattern::Repeating(u, r, v) => match (u, r, v) {
                (_, _, None) => self.max_len(),
                (Unit::Day, Unit::Week, _) => Duration::days(7),
                (Unit::Day, Unit::Month, _) => Duration::days(62),
                (Unit::Month, Unit::Year, _) => Duration::days(366),
                _ => Duration::days(1),
            },
            Pattern::Named(n) if SEASONS.contains(n) => Duration::days(366),
            Pattern::Named(_) => Duration::days(1),
            Pattern::Union(items) => items.iter().map(Pattern::spacing).min().unwrap(),
            Pattern::Intersection(items) => items.iter().map(Pattern::spacing).max().unwrap(),
            Pattern::Period(..) | Pattern::PeriodSum(_) => unreachable!(),
        }
    }

    fn period_parts(&self) -> Option<Vec<(Unit, i64)>> {
        match self {
            Pattern::Period(u, n) => Some(vec![(*u, *n)]),
            Pattern::PeriodSum(parts) => Some(parts.clone()),
            _ => None,
        }
    }
}

fn finest(items: &[Pattern]) -> &Pattern {
    items.iter().min_by_key(|s| s.rank()).unwrap()
}

fn days(lo: NaiveDateTime, hi: NaiveDateTime) -> impl Iterator<Item = NaiveDateTime> {
    let mut d = lo.date().and_hms_opt(0, 0, 0).unwrap();
    std::iter::from_fn(move || {
        (d < hi).then(|| {
            let out = d;
            d += Duration::days(1);
            out
        })
    })
}

fn months(lo: NaiveDateTime, hi: NaiveDateTime) -> impl Iterator<Item = NaiveDateTime> {
    let mut m = ndt(lo.year(), lo.month(), 1, 0, 0, 0);
    std::iter::from_fn(move || {
        (m < hi).then(|| {
            let out = m;
            m = m.checked_add_months(Months::new(1)).unwrap();
            out
        })
    })
}

fn named_instances(name: &str, lo: NaiveDateTime, hi: NaiveDateTime) -> Vec<Span> {
    let mut out = Vec::new();
    if let Some(first_month) = match name {
        "Spring" => Some(3),
        "Summer" => Some(6),
        "Fall" => Some(9),
        "Winter" => Some(12),
        _ => None,
    } {
        for m in months(lo, hi).filter(|m| m.month() == first_month) {
            out.push((m, m.checked_add_months(Months::new(3)).unwrap()));
        }
        return out;
    }
    let (from, to) = match name {
        "Morning" => ((6, 0), (12, 0)),
        "Noon" => ((12, 0), (12, 1)),
        "Afternoon" => ((12, 0), (18, 0)),
        "Evening" => ((18, 0), (21, 0)),
        "Night" => ((21, 0), (24, 0)),
        other => panic!("unknown name {other}"),
    };
    for d in days(lo, hi) {
        let at = |(h, m): (i64, i64)| d + Duration::minutes(h * 60 + m);
        out.push((at(from), at(to)));
    }
    out
}

/// Every instance of a repeating pattern whose start lies in `[lo, hi)`.
fn starting_in(pattern: &Pattern, lo: NaiveDateTime, hi: NaiveDateTime) -> Vec<Span> {
    let mut out: Vec<Span> = match pattern {
        Pattern::Repeating(u, r, Some(v)) => match (u, r) {
            (Unit::Month, Unit::Year) => months(lo, hi)
                .filter(|m| m.month() as i64 == *v)
                .map(|m| (m, m.checked_add_months(Months::new(1)).unwrap()))
                .collect(),
            (Unit::Day, Unit::Week) => days(lo, hi)
                .filter(|d| d.weekday().num_days_from_monday() as i64 == *v)
                .map(|d| (d, d + Duration::days(1)))
                .collect(),
            (Unit::Day, Unit::Month) => days(lo, hi)
                .filter(|d| d.day() as i64 == *v)
                .map(|d| (d, d + Duration::days(1)))
                .collect(),
            (Unit::Hour, Unit::Day) => days(lo, hi)
                .map(|d| d + Duration::hours(*v))
                .map(|h| (h, h + Duration::hours(1)))
                .collect(),
            other => panic!("no oracle for {other:?}"),
        },
        Pattern::Repeating(u, _, None) => match unit_seconds(*u) {
            Some(len) if len < 86_400 => {
                let mut t = truncate(lo, *u);
                let step = Duration::seconds(len);
                let mut v = Vec::new();
                while t < hi {
                    v.push((t, t + step));
                    t += step;
                }
                v
            }
            Some(_) => days(lo, hi)
                .filter(|d| *u == Unit::Day || d.weekday() == chrono::Weekday::Mon)
                .map(|d| (d, d + Duration::seconds(unit_seconds(*u).unwrap())))
                .collect(),
            None => {
                let keep = |m: &NaiveDateTime| match u {
                    Unit::Month => true,
                    Unit::Year => m.month() == 1,
                    _ => m.month() == 1 && m.year() % 100 == 0,
                };
                let step = Months::new(unit_months(*u));
                let lo = lo.max(ndt(-1, 1, 1, 0, 0, 0));
                let hi = hi.min(ndt(10_001, 1, 1, 0, 0, 0));
                if *u == Unit::Month {
                    months(lo, hi).map(|m| (m, m.checked_add_months(step).unwrap())).collect()
                } else {
                    (lo.year()..=hi.year())
                        .map(|y| ndt(y, 1, 1, 0, 0, 0))
                        .filter(keep)
                        .map(|m| (m, m.checked_add_months(step).unwrap()))
                        .collect()
                }
            }
        },
        Pattern::Named(name) => named_instances(name, lo, hi),
        Pattern::Union(items) => items.iter().flat_map(|s| starting_in(s, lo, hi)).collect(),
        Pattern::Intersection(items) => {
            let base = finest(items);
            let others: Vec<Vec<Span>> = items
                .iter()
                .filter(|s| !std::ptr::eq(*s, base))
                .map(|s| starting_in(s, lo - s.max_len(), hi))
                .collect();
            starting_in(base, lo, hi)
                .into_iter()
                .filter(|c| {
                    others
                        .iter()
                        .all(|insts| insts.iter().any(|o| o.0 <= c.0 && c.1 <= o.1))
                })
                .collect()
        }
        Pattern::Period(..) | Pattern::PeriodSum(_) => unreachable!(),
    };
    out.retain(|s| s.0 >= lo && s.0 < hi && in_domain(s.0) && in_domain(s.1));
    out
}

fn apply(parts: &[(Unit, i64)], t: NaiveDateTime, sign: i64, k: i64) -> Option<NaiveDateTime> {
    parts.iter().try_fold(t, |acc, (u, n)| advance(acc, *u, n * k * sign))
}

fn period_stream(parts: &[(Unit, i64)], anchor: NaiveDateTime, forward: bool, count: usize) -> Vec<Span> {
    let sign = if forward { 1 } else { -1 };
    let mut out = Vec::new();
    for k in 0..count as i64 {
        let (Some(a), Some(b)) = (apply(parts, anchor, sign, k), apply(parts, anchor, sign, k + 1)) else {
            break;
        };
        out.push(if forward { (a, b) } else { (b, a) });
    }
    out
}

const DOMAIN_SPAN: i64 = 10_100 * 366;

/// The first `count` instances starting at or after `anchor`, ascending.
pub fn following(pattern: &Pattern, anchor: NaiveDateTime, count: usize) -> Vec<Span> {
    if let Some(parts) = pattern.period_parts() {
        return period_stream(&parts, anchor, true, count);
    }
    let mut window = pattern.spacing() * (count as i32 + 2);
    loop {
        let hi = anchor + window;
        let mut found = starting_in(pattern, anchor, hi);
        found.sort();
        found.dedup();
        if found.len() >= count || window > Duration::days(DOMAIN_SPAN) || !in_domain(hi) {
            found.truncate(count);
            return found;
        }
        window = window * 2;
    }
}

/// The first `count` instances ending at or before `anchor`, latest end
/// first.
pub fn preceding(pattern: &Pattern, anchor: NaiveDateTime, count: usize) -> Vec<Span> {
    if let Some(parts) = pattern.period_parts() {
        return period_stream(&parts, anchor, false, count);
    }
    let mut window = pattern.spacing() * (count as i32 + 2);
    loop {
        let lo = anchor - window;
        let mut found: Vec<Span> = starting_in(pattern, lo - pattern.max_len(), anchor)
            .into_iter()
            .filter(|s| s.1 <= anchor && s.1 >= lo)
            .collect();
        found.sort_by_key(|s| std::cmp::Reverse((s.1, s.0)));
        found.dedup();
        if found.len() >= count || window > Duration::days(DOMAIN_SPAN) || !in_domain(lo) {
            found.truncate(count);
            return found;
        }
        window = window * 2;
    }
}

/// Library stream instances, for comparison with the oracle.
pub fn library_stream(pattern: &Pattern, anchor: NaiveDateTime, forward: bool, count: usize) -> Vec<Span> {
    let shift = pattern.shift();
    let ts = to_ts(anchor);
    let stream = if forward { shift.following(ts) } else { shift.preceding(ts) };
    stream.unwrap().take(count).map(|i| span(&i)).collect()
}

// Random case generation.

pub const UNITS: [Unit; 8] = Unit::ALL;

pub fn random_anchor(rng: &mut ChaCha8Rng) -> NaiveDateTime {
    let day = NaiveDate::from_ymd_opt(1900, 1, 1).unwrap()
        + Duration::days(rng.random_range(0..(201 * 365 + 49)));
    let t = day.and_hms_opt(0, 0, 0).unwrap();
    // Midnight often, to hit boundary cases.
    if rng.random_bool(0.3) {
        t
    } else {
        t + Duration::seconds(rng.random_range(0..86_400))
    }
}

fn random_period_part(rng: &mut ChaCha8Rng) -> (Unit, i64) {
    let u = *UNITS.choose(rng).unwrap();
    let n = if u == Unit::Century { rng.random_range(1..=2) } else { rng.random_range(1..=5) };
    (u, n)
}

pub fn random_period(rng: &mut ChaCha8Rng) -> Pattern {
    let (u, n) = random_period_part(rng);
    Pattern::Period(u, n)
}

pub fn random_period_sum(rng: &mut ChaCha8Rng) -> Pattern {
    let k = rng.random_range(2..=3);
    Pattern::PeriodSum((0..k).map(|_| random_period_part(rng)).collect())
}

pub fn random_valued(rng: &mut ChaCha8Rng) -> Pattern {
    match rng.random_range(0..4) {
        0 => Pattern::Repeating(Unit::Month, Unit::Year, Some(rng.random_range(1..=12))),
        1 => Pattern::Repeating(Unit::Day, Unit::Week, Some(rng.random_range(0..=6))),
        2 => Pattern::Repeating(Unit::Day, Unit::Month, Some(rng.random_range(1..=31))),
        _ => Pattern::Repeating(Unit::Hour, Unit::Day, Some(rng.random_range(0..=23))),
    }
}

pub fn random_repeating(rng: &mut ChaCha8Rng) -> Pattern {
    if rng.random_bool(0.6) {
        random_valued(rng)
    } else {
        let u = *UNITS.choose(rng).unwrap();
        Pattern::Repeating(u, u, None)
    }
}

pub fn random_named(rng: &mut ChaCha8Rng) -> Pattern {
    let all: Vec<&'static str> = SEASONS.iter().chain(DAY_PARTS.iter()).copied().collect();
    Pattern::Named(all.choose(rng).unwrap())
}

pub fn random_union(rng: &mut ChaCha8Rng) -> Pattern {
    let k = rng.random_range(2..=3);
    Pattern::Union(
        (0..k)
            .map(|_| match rng.random_range(0..3) {
                0 => random_valued(rng),
                1 => random_named(rng),
                _ => {
                    let u = *[Unit::Hour, Unit::Day, Unit::Week, Unit::Month].choose(rng).unwrap();
                    Pattern::Repeating(u, u, None)
                }
            })
            .collect(),
    )
}

pub fn random_intersection(rng: &mut ChaCha8Rng) -> Pattern {
    let weekday = |rng: &mut ChaCha8Rng| Pattern::Repeating(Unit::Day, Unit::Week, Some(rng.random_range(0..=6)));
    let month = |rng: &mut ChaCha8Rng| Pattern::Repeating(Unit::Month, Unit::Year, Some(rng.random_range(1..=12)));
    let hour = |rng: &mut ChaCha8Rng| Pattern::Repeating(Unit::Hour, Unit::Day, Some(rng.random_range(0..=23)));
    let parts = match rng.random_range(0..8) {
        0 => vec![weekday(rng), month(rng)],
        1 => vec![Pattern::Repeating(Unit::Day, Unit::Month, Some(rng.random_range(1..=28))), month(rng)],
        2 => vec![hour(rng), weekday(rng)],
        3 => vec![Pattern::Named(DAY_PARTS.choose(rng).unwrap()), weekday(rng)],
        4 => vec![weekday(rng), Pattern::Named(SEASONS.choose(rng).unwrap())],
        5 => vec![weekday(rng), Pattern::Repeating(Unit::Day, Unit::Month, Some(rng.random_range(1..=31)))],
        6 => vec![hour(rng), weekday(rng), month(rng)],
        _ => {
            let (d, m) = *[(29, 2), (31, 1), (31, 12), (30, 4), (31, 8)].choose(rng).unwrap();
            vec![
                Pattern::Repeating(Unit::Day, Unit::Month, Some(d)),
                Pattern::Repeating(Unit::Month, Unit::Year, Some(m)),
            ]
        }
    };
    Pattern::Intersection(parts)
}

pub type Generator = fn(&mut ChaCha8Rng) -> Pattern;

pub const FAMILIES: [(&str, Generator); 6] = [
    ("Period", random_period),
    ("PeriodSum", random_period_sum),
    ("Repeating", random_repeating),
    ("NamedRepeating", random_named),
    ("ShiftUnion", random_union),
    ("RepeatingIntersection", random_intersection),
];

/// Compares the first `count` instances in both directions. Returns the
/// number of (following, preceding) instances compared, or a description of
/// the first mismatch.
pub fn check_streams(pattern: &Pattern, anchor: NaiveDateTime, count: usize) -> Result<(usize, usize), String> {
    let mut lens = [0; 2];
    for (slot, forward) in [true, false].into_iter().enumerate() {
        let expected = if forward {
            following(pattern, anchor, count)
        } else {
            preceding(pattern, anchor, count)
        };
        let got = library_stream(pattern, anchor, forward, count);
        if got != expected {
            let show = |v: &[Span]| v.iter().map(render).collect::<Vec<_>>();
            return Err(format!(
                "{} {} from {anchor}:\n  library {:?}\n  oracle  {:?}",
                pattern.expr(),
                if forward { "following" } else { "preceding" },
                show(&got),
                show(&expected)
            ));
        }
        lens[slot] = got.len();
    }
    Ok((lens[0], lens[1]))
}

fn sorted(mut v: Vec<Span>) -> Vec<Span> {
    v.sort();
    v.dedup();
    v
}

/// Instances starting in `[lo, hi)`, ascending.
pub fn starting_between(pattern: &Pattern, lo: NaiveDateTime, hi: NaiveDateTime) -> Vec<Span> {
    sorted(starting_in(pattern, lo, hi))
}

/// Instances lying entirely inside `[lo, hi)`, ascending.
pub fn contained_in(pattern: &Pattern, lo: NaiveDateTime, hi: NaiveDateTime) -> Vec<Span> {
    sorted(starting_in(pattern, lo, hi).into_iter().filter(|s| s.1 <= hi).collect())
}

pub fn range_unit(pattern: &Pattern) -> Unit {
    match pattern {
        Pattern::Repeating(_, r, _) => *r,
        Pattern::Named(n) if SEASONS.contains(n) => Unit::Year,
        Pattern::Named(_) => Unit::Day,
        Pattern::Union(items) | Pattern::Intersection(items) => items.iter().map(range_unit).max().unwrap(),
        Pattern::Period(..) | Pattern::PeriodSum(_) => unreachable!(),
    }
}

/// "This": the instance containing the anchor, else the only instance
/// starting in the range unit around the anchor start.
pub fn this(pattern: &Pattern, anchor: Span) -> Option<Span> {
    let range = range_unit(pattern);
    let range_start = truncate(anchor.0, range);
    let range_end = advance(range_start, range, 1)?;
    let back = advance(range_start, range, -1).unwrap_or(range_start);
    let containing = starting_between(pattern, back - pattern.max_len(), anchor.0 + Duration::seconds(1))
        .into_iter()
        .find(|s| s.0 <= anchor.0 && anchor.1 <= s.1);
    if containing.is_some() {
        return containing;
    }
    match starting_between(pattern, range_start, range_end).as_slice() {
        [only] => Some(*only),
        _ => None,
    }
}

/// Span of `Interval.of(components...)`.
pub fn interval_of(c: &[i64]) -> Span {
    let get = |i: usize, default: i64| c.get(i).copied().unwrap_or(default);
    let start = ndt(
        get(0, 0) as i32,
        get(1, 1) as u32,
        get(2, 1) as u32,
        get(3, 0) as u32,
        get(4, 0) as u32,
        get(5, 0) as u32,
    );
    let unit = [Unit::Year, Unit::Month, Unit::Day, Unit::Hour, Unit::Minute, Unit::Second][c.len() - 1];
    (start, advance(start, unit, 1).unwrap())
}

// Random expression trees for parser round-trips.

fn random_string(rng: &mut ChaCha8Rng) -> String {
    let alphabet: Vec<char> = "aZ09 _-.,()[]='\"\\\t\u{e9}\u{4e2d}\u{1f600}".chars().collect();
    (0..rng.random_range(0..8)).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn random_ident(rng: &mut ChaCha8Rng) -> String {
    let pool = ["YEAR", "MONTH", "DAY", "WEEK", "HOUR", "x", "unit_2", "Foo"];
    pool.choose(rng).unwrap().to_string()
}

fn random_leaf(rng: &mut ChaCha8Rng) -> scate::Expr {
    use scate::Expr;
    match rng.random_range(0..6) {
        0 => Expr::Int(match rng.random_range(0..4) {
            0 => i64::MIN,
            1 => i64::MAX,
            _ => rng.random_range(-5_000..5_000),
        }),
        1 => Expr::Str(random_string(rng)),
        2 => Expr::Bool(rng.random_bool(0.5)),
        3 => Expr::None,
        _ => Expr::Ident(random_ident(rng)),
    }
}

pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> scate::Expr {
    use scate::dsl::registry::CONSTRUCTORS;
    use scate::Expr;
    if depth == 0 || rng.random_bool(0.3) {
        return random_leaf(rng);
    }
    if rng.random_bool(0.2) {
        let n = rng.random_range(0..4);
        return Expr::List((0..n).map(|_| random_expr(rng, depth - 1)).collect());
    }
    let ctor = CONSTRUCTORS.choose(rng).unwrap();
    let n_params = ctor.params.len();
    let positional = rng.random_range(0..=n_params);
    let args = (0..positional).map(|_| random_expr(rng, depth - 1)).collect();
    let mut kwargs = Vec::new();
    for name in &ctor.params[positional..] {
        if rng.random_bool(0.5) {
            kwargs.push((name.to_string(), random_expr(rng, depth - 1)));
        }
    }
    // Keyword order in the source is irrelevant.
    if kwargs.len() > 1 && rng.random_bool(0.5) {
        kwargs.reverse();
    }
    Expr::Call {
        name: ctor.name.to_string(),
        args,
        kwargs,
    }
}

/// The worked expressions used throughout the documentation.
pub const WORKED_EXPRESSIONS: [&str; 15] = [
    "Last(Interval.of(1912, 2, 14), Summer())",
    "After(Interval.of(1993, 1, 23), Repeating(MONTH, YEAR, value=4), n=3)",
    "Nth(Year(2024), Repeating(DAY, WEEK, value=6), index=3, from_end=True)",
    "This(Interval.of(1037, 11, 10), Repeating(MONTH, YEAR, value=1))",
    "Between(Year(1994), Interval.of(2007, 1, 9))",
    "Intersection([Last(Interval.of(1979, 1, 24, 6), None), Interval.of(1979, 1, 24)])",
    "NextN(Interval.of(1714, 12, 22), Repeating(DAY, WEEK, value=4), n=6)",
    "These(Interval.of(2025, 1), Repeating(DAY, WEEK, value=1))",
    "ShiftUnion([Repeating(DAY, WEEK, value=0), Repeating(DAY, WEEK, value=4)])",
    "RepeatingIntersection([Repeating(DAY, WEEK, value=5), Repeating(MONTH, YEAR, value=3)])",
    "Last(interval=Interval.of(1998, 2, 13), shift=Period(unit=YEAR, n=None))",
    "Interval.of(1990)",
    "Interval.of(1990, 1, 1)",
    "Interval.fromisoformat(\"1990-01-01T00:00:00 1994-01-01T00:00:00\")",
    "Repeating(MONTH, YEAR, value=2)",
];
