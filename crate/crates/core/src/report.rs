//! Deterministic JSON output: sorted keys, floats rounded to 12 decimals.

use serde::Serialize;
use serde_json::Value;

const DECIMALS: f64 = 1e12;

pub fn round_f64(x: f64) -> f64 {
    if !x.is_finite() || x.abs() >= 1e6 {
        return x;
    }
    let r = (x * DECIMALS).round() / DECIMALS;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every float in a JSON tree. Objects come out key-sorted because
/// `serde_json::Map` is ordered.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_f64(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(report: &T) -> Value {
    round_value(serde_json::to_value(report).expect("report serializes"))
}

pub fn to_pretty<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(&to_value(report)).expect("json")
}
