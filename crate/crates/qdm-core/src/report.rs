//! Deterministic report output: sorted keys, floats rounded to 12
//! significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::{QdmError, Result};

/// `x` rounded to 12 significant digits; -0 becomes 0.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text for `x` after rounding to 12 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap());
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        // serde_json's default map is ordered by key.
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map(normalize).map_err(|e| QdmError::Invariant(format!("serialization: {e}")))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&normalize(v.clone())).expect("values serialize");
    s.push('\n');
    s
}
