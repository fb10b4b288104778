//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON document,
//! either `{"ok": true, ...}` or `{"ok": false, "category": ..., "message": ...}`,
//! so the page never has to catch exceptions.

use scate::annotations::ValueRecord;
use scate::{dsl, DslError, NormalizedValue, Timestamp};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Upper bound on instances returned by [`instances`].
pub const MAX_INSTANCES: usize = 200;

fn failure(category: &str, message: impl Into<String>) -> Value {
    json!({"ok": false, "category": category, "message": message.into()})
}

fn dsl_failure(e: &DslError) -> Value {
    json!({"ok": false, "category": e.category.as_str(), "message": e.message, "offset": e.offset})
}

/// Parses and evaluates one expression.
pub fn evaluate_json(expr: &str) -> Value {
    match dsl::execute(expr) {
        Ok(v) => {
            let record = ValueRecord::from(&v);
            json!({"ok": true, "human": record.human(), "value": record})
        }
        Err(e) => dsl_failure(&e),
    }
}

/// The first `count` instances of a shift after (`"following"`) or before
/// (`"preceding"`) an anchor timestamp.
pub fn instances_json(shift_expr: &str, anchor: &str, count: usize, direction: &str) -> Value {
    let shift = match dsl::execute(shift_expr) {
        Ok(NormalizedValue::Period(s) | NormalizedValue::Repeating(s)) => s,
        Ok(_) => return failure("not-a-shift", format!("{shift_expr} is anchored; expected a period or repeating")),
        Err(e) => return dsl_failure(&e),
    };
    let anchor: Timestamp = match anchor.trim().parse() {
        Ok(t) => t,
        Err(e) => return failure("bad-anchor", e.to_string()),
    };
    let stream = match direction {
        "following" => shift.following(anchor),
        "preceding" => shift.preceding(anchor),
        other => return failure("bad-direction", format!("unknown direction {other:?}")),
    };
    match stream {
        Ok(it) => {
            let list: Vec<[String; 2]> = it
                .take(count.min(MAX_INSTANCES))
                .map(|i| [endpoint(i.start()), endpoint(i.end())])
                .collect();
            json!({"ok": true, "shift": shift.to_string(), "anchor": anchor.to_string(), "instances": list})
        }
        Err(e) => failure("out-of-range", e.to_string()),
    }
}

fn endpoint(t: Option<Timestamp>) -> String {
    t.map_or_else(|| "...".to_string(), |t| t.to_string())
}

/// Canonical rendering of an expression, without evaluating it.
pub fn canonicalize_json(expr: &str) -> Value {
    match dsl::parse(expr) {
        Ok(e) => json!({"ok": true, "canonical": dsl::format(&e)}),
        Err(e) => dsl_failure(&e),
    }
}

#[wasm_bindgen]
pub fn evaluate(expr: &str) -> String {
    evaluate_json(expr).to_string()
}

#[wasm_bindgen]
pub fn instances(shift_expr: &str, anchor: &str, count: usize, direction: &str) -> String {
    instances_json(shift_expr, anchor, count, direction).to_string()
}

#[wasm_bindgen]
pub fn canonicalize(expr: &str) -> String {
    canonicalize_json(expr).to_string()
}
