use std::fmt;

use super::registry;

/// Expression-language syntax tree.
///
/// Keyword arguments compare as a set: two calls are equal when they have the
/// same positional arguments and the same name/value keyword pairs, in any
/// order.
#[derive(Debug, Clone)]
pub enum Expr {
    Call {
        name: String,
        args: Vec<Expr>,
        kwargs: Vec<(String, Expr)>,
    },
    List(Vec<Expr>),
    Int(i64),
    Str(String),
    Bool(bool),
    None,
    /// A bare identifier such as `YEAR`.
    Ident(String),
}

impl Expr {
    pub fn call(name: &str, args: Vec<Expr>, kwargs: Vec<(&str, Expr)>) -> Expr {
        Expr::Call {
            name: name.to_string(),
            args,
            kwargs: kwargs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }
}

fn sorted_kwargs(kwargs: &[(String, Expr)]) -> Vec<&(String, Expr)> {
    let mut v: Vec<_> = kwargs.iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Expr::Call { name: n1, args: a1, kwargs: k1 },
                Expr::Call { name: n2, args: a2, kwargs: k2 },
            ) => n1 == n2 && a1 == a2 && sorted_kwargs(k1) == sorted_kwargs(k2),
            (Expr::List(a), Expr::List(b)) => a == b,
            (Expr::Int(a), Expr::Int(b)) => a == b,
            (Expr::Str(a), Expr::Str(b)) => a == b,
            (Expr::Bool(a), Expr::Bool(b)) => a == b,
            (Expr::None, Expr::None) => true,
            (Expr::Ident(a), Expr::Ident(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Expr {}

fn write_joined<'a>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = &'a Expr>) -> fmt::Result {
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Canonical single-line form. Keyword arguments follow the constructor's
/// parameter order; keywords the registry does not know keep their written
/// order after the known ones.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Call { name, args, kwargs } => {
                write!(f, "{name}(")?;
                write_joined(f, args.iter())?;
                let order = |key: &str| {
                    registry::lookup(name)
                        .and_then(|c| c.params.iter().position(|p| *p == key))
                        .unwrap_or(usize::MAX)
                };
                let mut ordered: Vec<&(String, Expr)> = kwargs.iter().collect();
                ordered.sort_by_key(|(k, _)| order(k));
                for (i, (key, value)) in ordered.into_iter().enumerate() {
                    if i > 0 || !args.is_empty() {
                        f.write_str(", ")?;
                    }
                    write!(f, "{key}={value}")?;
                }
                f.write_str(")")
            }
            Expr::List(items) => {
                f.write_str("[")?;
                write_joined(f, items.iter())?;
                f.write_str("]")
            }
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Str(s) => {
                f.write_str("\"")?;
                for ch in s.chars() {
                    match ch {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Expr::Bool(true) => f.write_str("True"),
            Expr::Bool(false) => f.write_str("False"),
            Expr::None => f.write_str("None"),
            Expr::Ident(name) => f.write_str(name),
        }
    }
}
