//! Deterministic JSON rendering of exact values.
//!
//! Rationals print as integers when integral and as `"p/q"` strings
//! otherwise; a non-integral value also gets a `<key>_decimal` companion with
//! 15 fractional digits.

use serde_json::{json, Map, Value};

use cubetight::hypdiag::CurtainValue;
use cubetight::numeric::{decimal_string, rational_to_json};
use cubetight::{MetricForm, Rational};

pub const DECIMAL_DIGITS: usize = 15;

pub fn put_rational(obj: &mut Map<String, Value>, key: &str, r: &Rational) {
    obj.insert(key.to_string(), rational_to_json(r));
    if !r.is_integer() {
        obj.insert(format!("{key}_decimal"), Value::String(decimal_string(r, DECIMAL_DIGITS)));
    }
}

pub fn put_form(obj: &mut Map<String, Value>, key: &str, f: &MetricForm) {
    obj.insert(key.to_string(), form_json(f));
    if f.values().iter().any(|v| !v.is_integer()) {
        obj.insert(format!("{key}_decimal"), form_decimal(f));
    }
}

pub fn form_json(f: &MetricForm) -> Value {
    Value::Array(f.values().iter().map(rational_to_json).collect())
}

pub fn form_decimal(f: &MetricForm) -> Value {
    Value::Array(f.values().iter().map(|v| Value::String(decimal_string(v, DECIMAL_DIGITS))).collect())
}

pub fn curtain_json(v: &CurtainValue) -> Value {
    json!({
        "rational": rational_to_json(&v.rational),
        "zeta_coefficient": rational_to_json(&v.zeta_coefficient),
        "exponent": v.exponent,
        "decimal": v.decimal(DECIMAL_DIGITS),
    })
}

/// Key for an unordered vertex pair.
pub fn pair_key(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

pub fn to_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}
