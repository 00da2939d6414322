use std::fmt::Write;

use serde_json::Value;

/// A command's result: a JSON value, plus an optional plain-text form used
/// when no format is requested.
pub struct Report {
    pub value: Value,
    pub text: Option<String>,
}

impl Report {
    pub fn new(value: Value) -> Self {
        Report { value, text: None }
    }

    pub fn plain(value: Value, text: String) -> Self {
        Report { value, text: Some(text) }
    }

    /// Pretty JSON. Object keys are sorted, so output is deterministic.
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.value).expect("JSON values serialize")
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        render(&mut out, &self.value, 0);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// A flat list of scalars, joined.
fn row(v: &Value) -> Option<String> {
    let items = v.as_array()?;
    items.iter().map(scalar).collect::<Option<Vec<_>>>().map(|s| format!("[{}]", s.join(" ")))
}

fn render(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                if let Some(s) = scalar(val).or_else(|| row(val)) {
                    let _ = writeln!(out, "{pad}{key}: {s}");
                } else if val.as_array().is_some_and(Vec::is_empty) || val.as_object().is_some_and(|m| m.is_empty()) {
                    let _ = writeln!(out, "{pad}{key}: none");
                } else {
                    let _ = writeln!(out, "{pad}{key}:");
                    render(out, val, depth + 1);
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if let Some(s) = scalar(item).or_else(|| row(item)) {
                    let _ = writeln!(out, "{pad}{s}");
                } else {
                    let _ = writeln!(out, "{pad}#{i}");
                    render(out, item, depth + 1);
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", scalar(v).unwrap_or_default());
        }
    }
}
