//! The expression language: constructor calls such as
//! `Last(Interval.of(1912, 2, 14), Summer())`, parsed into [`Expr`] trees and
//! evaluated to [`NormalizedValue`]s.

mod ast;
mod eval;
mod lexer;
mod parser;
pub mod registry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{Budget, NormalizedValue, DEFAULT_BUDGET};

pub use ast::Expr;
pub use parser::{parse, MAX_DEPTH};

/// Failure classes shared by parsing and evaluation. Every category counts as
/// a runtime error for execution filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCategory {
    #[serde(rename = "lexical-error")]
    Lexical,
    #[serde(rename = "syntax-error")]
    Syntax,
    UnknownConstructor,
    #[serde(rename = "arity-mismatch")]
    Arity,
    #[serde(rename = "invalid-argument-value")]
    InvalidArgument,
    OperatorPrecondition,
    EmptyIntersection,
    OutOfRange,
    Unanchorable,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 9] = [
        ErrorCategory::Lexical,
        ErrorCategory::Syntax,
        ErrorCategory::UnknownConstructor,
        ErrorCategory::Arity,
        ErrorCategory::InvalidArgument,
        ErrorCategory::OperatorPrecondition,
        ErrorCategory::EmptyIntersection,
        ErrorCategory::OutOfRange,
        ErrorCategory::Unanchorable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Lexical => "lexical-error",
            ErrorCategory::Syntax => "syntax-error",
            ErrorCategory::UnknownConstructor => "unknown-constructor",
            ErrorCategory::Arity => "arity-mismatch",
            ErrorCategory::InvalidArgument => "invalid-argument-value",
            ErrorCategory::OperatorPrecondition => "operator-precondition",
            ErrorCategory::EmptyIntersection => "empty-intersection",
            ErrorCategory::OutOfRange => "out-of-range",
            ErrorCategory::Unanchorable => "unanchorable",
        }
    }

    /// Lexical and syntax errors; everything else is raised by evaluation.
    pub fn is_parse_error(self) -> bool {
        matches!(self, ErrorCategory::Lexical | ErrorCategory::Syntax)
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown error category {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct DslError {
    pub category: ErrorCategory,
    pub message: String,
    /// Byte offset into the source text, for lexical and syntax errors.
    pub offset: Option<usize>,
}

impl DslError {
    pub fn new(category: ErrorCategory, message: impl Into<String>) -> Self {
        DslError {
            category,
            message: message.into(),
            offset: None,
        }
    }

    pub(crate) fn at(mut self, offset: usize) -> Self {
        self.offset = Some(offset);
        self
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(o) => write!(f, "{} at byte {o}: {}", self.category, self.message),
            None => write!(f, "{}: {}", self.category, self.message),
        }
    }
}

/// Canonical single-line rendering of an expression.
pub fn format(expr: &Expr) -> String {
    expr.to_string()
}

/// Evaluates with the default instance budget.
pub fn evaluate(expr: &Expr) -> Result<NormalizedValue, DslError> {
    evaluate_with_budget(expr, DEFAULT_BUDGET)
}

/// Evaluates with at most `budget` stream instances consumed across the whole
/// expression.
pub fn evaluate_with_budget(expr: &Expr, budget: usize) -> Result<NormalizedValue, DslError> {
    eval::Evaluator {
        budget: Budget::new(budget),
    }
    .evaluate(expr)
}

/// Parses and evaluates source text.
pub fn execute(text: &str) -> Result<NormalizedValue, DslError> {
    evaluate(&parse(text)?)
}
