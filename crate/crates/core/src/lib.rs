//! Executable compositional temporal semantics.
//!
//! The crate is layered bottom-up:
//!
//! * [`temporal`]: timestamps, calendar units and half-open intervals;
//! * [`shift`]: periods and repeating intervals with their instance streams;
//! * [`operators`]: `Last`, `Next`, `Before`, `After`, `Nth`, `This`,
//!   `Between`, `Intersection`, `These`, `LastN`, `NextN`;
//! * [`dsl`]: the textual expression language (parser, formatter, evaluator);
//! * [`annotations`]: line-delimited annotation records and model output parsing;
//! * [`evaluation`]: execution-based scoring and bootstrap statistics;
//! * [`augmentation`]: prompt construction, completion providers and the
//!   execution filter.

pub mod annotations;
pub mod augmentation;
pub mod dsl;
pub mod evaluation;
pub mod operators;
pub mod shift;
pub mod temporal;

pub use dsl::{DslError, ErrorCategory, Expr};
pub use operators::{Budget, NormalizedValue, OpError};
pub use shift::{Direction, NamedRepeating, Period, Repeating, Shift, ShiftError};
pub use temporal::{Interval, TemporalError, Timestamp, Unit};
