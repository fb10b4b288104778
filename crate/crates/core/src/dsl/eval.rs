use super::ast::Expr;
use super::registry::{self, Constructor};
use super::{DslError, ErrorCategory};
use crate::operators::{self, Budget, NormalizedValue, OpError};
use crate::shift::{NamedRepeating, Period, Repeating, Shift, ShiftError};
use crate::temporal::{Interval, TemporalError, Unit};

/// Intermediate value of a sub-expression.
#[derive(Debug, Clone)]
enum Value {
    Interval(Interval),
    Intervals(Vec<Interval>),
    Shift(Shift),
    Unit(Unit),
    Int(i64),
    Str(String),
    Bool(bool),
    None,
    List(Vec<Value>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Interval(_) => "an interval",
            Value::Intervals(_) => "a list of intervals",
            Value::Shift(s) if s.is_period() => "a period",
            Value::Shift(_) => "a repeating interval",
            Value::Unit(_) => "a unit",
            Value::Int(_) => "an integer",
            Value::Str(_) => "a string",
            Value::Bool(_) => "a boolean",
            Value::None => "None",
            Value::List(_) => "a list",
        }
    }
}

impl From<OpError> for DslError {
    fn from(e: OpError) -> Self {
        let category = match e {
            OpError::Precondition(_) | OpError::Ambiguous(_) => ErrorCategory::OperatorPrecondition,
            OpError::EmptyIntersection => ErrorCategory::EmptyIntersection,
            OpError::OutOfRange(_) => ErrorCategory::OutOfRange,
            OpError::Unanchorable(_) => ErrorCategory::Unanchorable,
            OpError::InvalidArgument(_) => ErrorCategory::InvalidArgument,
        };
        DslError::new(category, e.to_string())
    }
}

impl From<ShiftError> for DslError {
    fn from(e: ShiftError) -> Self {
        OpError::from(e).into()
    }
}

impl From<TemporalError> for DslError {
    fn from(e: TemporalError) -> Self {
        OpError::from(e).into()
    }
}

fn invalid(message: impl Into<String>) -> DslError {
    DslError::new(ErrorCategory::InvalidArgument, message)
}

/// Arguments of one call, bound to the constructor's parameter slots.
struct Args {
    ctor: &'static Constructor,
    slots: Vec<Option<Value>>,
}

impl Args {
    fn take(&mut self, param: &str) -> Option<Value> {
        let idx = self
            .ctor
            .params
            .iter()
            .position(|p| *p == param)
            .expect("parameter declared in registry");
        self.slots[idx].take()
    }

    fn label(&self, param: &str) -> String {
        format!("{}({param}=...)", self.ctor.name)
    }

    fn required(&mut self, param: &str) -> Value {
        self.take(param).expect("required parameters are checked at binding")
    }

    fn interval(&mut self, param: &str) -> Result<Interval, DslError> {
        match self.required(param) {
            Value::Interval(i) => Ok(i),
            other => Err(invalid(format!("{} expects an interval, got {}", self.label(param), other.kind()))),
        }
    }

    fn shift(&mut self, param: &str) -> Result<Shift, DslError> {
        match self.required(param) {
            Value::Shift(s) => Ok(s),
            other => Err(invalid(format!("{} expects a shift, got {}", self.label(param), other.kind()))),
        }
    }

    fn optional_shift(&mut self, param: &str) -> Result<Option<Shift>, DslError> {
        match self.take(param) {
            None | Some(Value::None) => Ok(None),
            Some(Value::Shift(s)) => Ok(Some(s)),
            Some(other) => Err(invalid(format!("{} expects a shift or None, got {}", self.label(param), other.kind()))),
        }
    }

    fn int(&mut self, param: &str) -> Result<i64, DslError> {
        match self.required(param) {
            Value::Int(n) => Ok(n),
            other => Err(invalid(format!("{} expects an integer, got {}", self.label(param), other.kind()))),
        }
    }

    fn optional_int(&mut self, param: &str) -> Result<Option<i64>, DslError> {
        match self.take(param) {
            None | Some(Value::None) => Ok(None),
            Some(Value::Int(n)) => Ok(Some(n)),
            Some(other) => Err(invalid(format!("{} expects an integer or None, got {}", self.label(param), other.kind()))),
        }
    }

    fn int_or(&mut self, param: &str, default: i64) -> Result<i64, DslError> {
        Ok(self.optional_int(param)?.unwrap_or(default))
    }

    fn flag(&mut self, param: &str) -> Result<bool, DslError> {
        match self.take(param) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(b),
            Some(other) => Err(invalid(format!("{} expects True or False, got {}", self.label(param), other.kind()))),
        }
    }

    fn unit(&mut self, param: &str) -> Result<Unit, DslError> {
        match self.required(param) {
            Value::Unit(u) => Ok(u),
            other => Err(invalid(format!("{} expects a unit, got {}", self.label(param), other.kind()))),
        }
    }

    fn optional_unit(&mut self, param: &str) -> Result<Option<Unit>, DslError> {
        match self.take(param) {
            None | Some(Value::None) => Ok(None),
            Some(Value::Unit(u)) => Ok(Some(u)),
            Some(other) => Err(invalid(format!("{} expects a unit, got {}", self.label(param), other.kind()))),
        }
    }

    fn string(&mut self, param: &str) -> Result<String, DslError> {
        match self.required(param) {
            Value::Str(s) => Ok(s),
            other => Err(invalid(format!("{} expects a string, got {}", self.label(param), other.kind()))),
        }
    }

    fn list(&mut self, param: &str) -> Result<Vec<Value>, DslError> {
        match self.required(param) {
            Value::List(items) => Ok(items),
            other => Err(invalid(format!("{} expects a list, got {}", self.label(param), other.kind()))),
        }
    }

    fn intervals(&mut self, param: &str) -> Result<Vec<Interval>, DslError> {
        let label = self.label(param);
        self.list(param)?
            .into_iter()
            .map(|v| match v {
                Value::Interval(i) => Ok(i),
                other => Err(invalid(format!("{label} expects intervals, got {}", other.kind()))),
            })
            .collect()
    }

    fn shifts(&mut self, param: &str) -> Result<Vec<Shift>, DslError> {
        let label = self.label(param);
        self.list(param)?
            .into_iter()
            .map(|v| match v {
                Value::Shift(s) => Ok(s),
                other => Err(invalid(format!("{label} expects shifts, got {}", other.kind()))),
            })
            .collect()
    }
}

fn arity(message: String) -> DslError {
    DslError::new(ErrorCategory::Arity, message)
}

pub(super) struct Evaluator {
    pub budget: Budget,
}

impl Evaluator {
    fn bind(&mut self, name: &str, args: &[Expr], kwargs: &[(String, Expr)]) -> Result<Args, DslError> {
        let ctor = registry::lookup(name).ok_or_else(|| {
            DslError::new(ErrorCategory::UnknownConstructor, format!("unknown constructor {name}"))
        })?;
        if args.len() > ctor.params.len() {
            return Err(arity(format!(
                "{name} takes at most {} arguments, got {}",
                ctor.params.len(),
                args.len()
            )));
        }
        let mut exprs: Vec<Option<&Expr>> = vec![None; ctor.params.len()];
        for (slot, arg) in exprs.iter_mut().zip(args) {
            *slot = Some(arg);
        }
        for (key, value) in kwargs {
            let idx = ctor
                .params
                .iter()
                .position(|p| p == key)
                .ok_or_else(|| arity(format!("{name} has no parameter {key:?}")))?;
            if exprs[idx].is_some() {
                return Err(arity(format!("{name} got multiple values for {key:?}")));
            }
            exprs[idx] = Some(value);
        }
        if let Some(missing) = exprs[..ctor.required].iter().position(Option::is_none) {
            return Err(arity(format!("{name} is missing {:?}", ctor.params[missing])));
        }
        let slots = exprs
            .into_iter()
            .map(|e| e.map(|e| self.value(e)).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Args { ctor, slots })
    }

    fn value(&mut self, expr: &Expr) -> Result<Value, DslError> {
        match expr {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::None => Ok(Value::None),
            Expr::Ident(name) => name
                .parse::<Unit>()
                .map(Value::Unit)
                .map_err(|_| invalid(format!("unknown identifier {name}"))),
            Expr::List(items) => Ok(Value::List(
                items.iter().map(|e| self.value(e)).collect::<Result<_, _>>()?,
            )),
            Expr::Call { name, args, kwargs } => self.call(name, args, kwargs),
        }
    }

    fn call(&mut self, name: &str, args: &[Expr], kwargs: &[(String, Expr)]) -> Result<Value, DslError> {
        let mut a = self.bind(name, args, kwargs)?;
        let budget = &mut self.budget;
        let value = match name {
            "Interval.of" => {
                let mut components = vec![a.int("year")?];
                let mut gap = false;
                for p in ["month", "day", "hour", "minute", "second"] {
                    match a.optional_int(p)? {
                        Some(v) if gap => {
                            return Err(invalid(format!("Interval.of got {p}={v} after a missing component")))
                        }
                        Some(v) => components.push(v),
                        None => gap = true,
                    }
                }
                Value::Interval(Interval::of(&components).map_err(|e| invalid(e.to_string()))?)
            }
            "Interval.fromisoformat" => Value::Interval(
                Interval::from_iso(&a.string("text")?).map_err(|e| invalid(e.to_string()))?,
            ),
            "Year" => Value::Interval(Interval::of(&[a.int("digits")?]).map_err(|e| invalid(e.to_string()))?),
            "Period" => {
                let unit = a.unit("unit")?;
                Value::Shift(Shift::Period(Period::new(unit, a.optional_int("n")?)?))
            }
            "PeriodSum" => {
                let parts = a
                    .shifts("periods")?
                    .into_iter()
                    .map(|s| match s {
                        Shift::Period(p) => Ok(p),
                        other => Err(invalid(format!("PeriodSum expects Period values, got {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Value::Shift(Shift::period_sum(parts)?)
            }
            "Repeating" => {
                let unit = a.unit("unit")?;
                let range = a.optional_unit("range")?;
                Value::Shift(Shift::Repeating(Repeating::new(unit, range, a.optional_int("value")?)?))
            }
            "ShiftUnion" => Value::Shift(Shift::union(a.shifts("shifts")?)?),
            "RepeatingIntersection" => Value::Shift(Shift::intersection(a.shifts("shifts")?)?),
            "Last" => {
                let anchor = a.interval("interval")?;
                let shift = a.optional_shift("shift")?;
                Value::Interval(operators::last(&anchor, shift.as_ref(), budget)?)
            }
            "Next" => {
                let anchor = a.interval("interval")?;
                let shift = a.optional_shift("shift")?;
                Value::Interval(operators::next(&anchor, shift.as_ref(), budget)?)
            }
            "Before" | "After" => {
                let anchor = a.interval("interval")?;
                let shift = a.shift("shift")?;
                let n = a.int_or("n", 1)?;
                Value::Interval(if name == "Before" {
                    operators::before(&anchor, &shift, n, budget)?
                } else {
                    operators::after(&anchor, &shift, n, budget)?
                })
            }
            "Nth" => {
                let anchor = a.interval("interval")?;
                let shift = a.shift("shift")?;
                let index = a.int("index")?;
                let from_end = a.flag("from_end")?;
                Value::Interval(operators::nth(&anchor, &shift, index, from_end, budget)?)
            }
            "This" => {
                let anchor = a.interval("interval")?;
                let shift = a.shift("shift")?;
                Value::Interval(operators::this(&anchor, &shift, budget)?)
            }
            "Between" => {
                let start = a.interval("start_interval")?;
                let end = a.interval("end_interval")?;
                let start_included = a.flag("start_included")?;
                let end_included = a.flag("end_included")?;
                Value::Interval(operators::between(&start, &end, start_included, end_included)?)
            }
            "Intersection" => Value::Interval(operators::intersection(&a.intervals("intervals")?)?),
            "These" => {
                let anchor = a.interval("interval")?;
                let shift = a.shift("shift")?;
                Value::Intervals(operators::these(&anchor, &shift, budget)?)
            }
            "LastN" | "NextN" => {
                let anchor = a.interval("interval")?;
                let shift = a.shift("shift")?;
                let n = a.int("n")?;
                Value::Intervals(if name == "LastN" {
                    operators::last_n(&anchor, &shift, n, budget)?
                } else {
                    operators::next_n(&anchor, &shift, n, budget)?
                })
            }
            named => match NamedRepeating::from_name(named) {
                Some(n) => Value::Shift(Shift::Named(n)),
                None => unreachable!("registry entry {named} without evaluation rule"),
            },
        };
        Ok(value)
    }

    pub(super) fn evaluate(&mut self, expr: &Expr) -> Result<NormalizedValue, DslError> {
        match self.value(expr)? {
            Value::Interval(i) => Ok(NormalizedValue::Interval(i)),
            Value::Intervals(list) => Ok(NormalizedValue::Intervals(list)),
            Value::Shift(s) if s.is_period() => Ok(NormalizedValue::Period(s)),
            Value::Shift(s) => Ok(NormalizedValue::Repeating(s)),
            other => Err(invalid(format!("expression evaluates to {}, not a temporal value", other.kind()))),
        }
    }
}
