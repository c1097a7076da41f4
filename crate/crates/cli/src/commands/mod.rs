pub mod brackets;
pub mod dw_check;
pub mod quantum;
pub mod vacuum;
pub mod wkb;

use serde_json::{json, Value};

/// Finite floats as numbers, everything else as `null`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(";")
}
