//! Rendering of result documents as JSON or as a one-row CSV table.

use serde_json::{Map, Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn number(x: f64) -> Value {
    let r = round_sig(x);
    if r.fract() == 0.0 && r.abs() < 1e15 {
        Value::Number(Number::from(r as i64))
    } else {
        Number::from_f64(r)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// Rounds every number in the document.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => number(x),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Leaves of the document keyed by dotted paths, arrays indexed by position.
pub fn flatten(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(o) => o.iter().for_each(|(k, v)| walk(&key(k), v, out)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&key(&i.to_string()), v, out)),
            leaf => out.push((prefix.to_string(), leaf.clone())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_csv(v: &Value) -> Result<String, csv::Error> {
    let leaves = flatten(v);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(leaves.iter().map(|(k, _)| k.as_str()))?;
    w.write_record(leaves.iter().map(|(_, v)| cell(v)))?;
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(v: Value, csv: bool) -> Result<String, csv::Error> {
    let v = normalize(v);
    if csv {
        to_csv(&v)
    } else {
        Ok(serde_json::to_string_pretty(&v).expect("documents serialize") + "\n")
    }
}

/// Wraps a serializable result as an object.
pub fn doc<T: serde::Serialize>(x: &T) -> Map<String, Value> {
    match serde_json::to_value(x).expect("results serialize") {
        Value::Object(o) => o,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}
