//! Constructor table: every callable name with its parameters in declaration
//! order. The first `required` parameters must be supplied; the rest default.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constructor {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub required: usize,
}

const fn ctor(name: &'static str, params: &'static [&'static str], required: usize) -> Constructor {
    Constructor { name, params, required }
}

pub const CONSTRUCTORS: &[Constructor] = &[
    ctor("Interval.of", &["year", "month", "day", "hour", "minute", "second"], 1),
    ctor("Interval.fromisoformat", &["text"], 1),
    ctor("Year", &["digits"], 1),
    ctor("Period", &["unit", "n"], 1),
    ctor("PeriodSum", &["periods"], 1),
    ctor("Repeating", &["unit", "range", "value"], 1),
    ctor("Spring", &[], 0),
    ctor("Summer", &[], 0),
    ctor("Fall", &[], 0),
    ctor("Winter", &[], 0),
    ctor("Morning", &[], 0),
    ctor("Noon", &[], 0),
    ctor("Afternoon", &[], 0),
    ctor("Evening", &[], 0),
    ctor("Night", &[], 0),
    ctor("Last", &["interval", "shift"], 1),
    ctor("Next", &["interval", "shift"], 1),
    ctor("Before", &["interval", "shift", "n"], 2),
    ctor("After", &["interval", "shift", "n"], 2),
    ctor("Nth", &["interval", "shift", "index", "from_end"], 3),
    ctor("This", &["interval", "shift"], 2),
    ctor("Between", &["start_interval", "end_interval", "start_included", "end_included"], 2),
    ctor("Intersection", &["intervals"], 1),
    ctor("These", &["interval", "shift"], 2),
    ctor("LastN", &["interval", "shift", "n"], 3),
    ctor("NextN", &["interval", "shift", "n"], 3),
    ctor("ShiftUnion", &["shifts"], 1),
    ctor("RepeatingIntersection", &["shifts"], 1),
];

pub fn lookup(name: &str) -> Option<&'static Constructor> {
    CONSTRUCTORS.iter().find(|c| c.name == name)
}
