use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::Provenance;
use crate::error::{Error, Result};

/// Flattened `key: value` lines of any serializable report.
pub trait KeyValue {
    fn key_values(&self) -> Vec<(String, String)>;
}

impl<T: Serialize> KeyValue for T {
    fn key_values(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        flatten("", &serde_json::to_value(self).unwrap_or(Value::Null), &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", joined.join(", "))));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

pub(crate) fn render_text<T: Serialize>(report: &T, prov: &Provenance) -> String {
    let mut text = String::new();
    for l in prov.header_lines() {
        text.push_str(&format!("# {l}\n"));
    }
    for (k, v) in report.key_values() {
        text.push_str(&format!("{k}: {v}\n"));
    }
    text
}

/// Write `<stem>.txt` and/or `<stem>.json` into `dir`.
pub fn write_report<T: Serialize>(
    dir: impl AsRef<Path>,
    stem: &str,
    report: &T,
    prov: &Provenance,
    text: bool,
    json: bool,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if text {
        let p = dir.join(format!("{stem}.txt"));
        fs::write(&p, render_text(report, prov)).map_err(|e| Error::io(&p, e))?;
    }
    if json {
        let p = dir.join(format!("{stem}.json"));
        let body = serde_json::json!({ "provenance": prov, "report": report });
        let s = serde_json::to_string_pretty(&body).expect("report serializes");
        fs::write(&p, s).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct R {
        k: f64,
        v: Vec<f64>,
        inner: Inner,
    }
    #[derive(Serialize)]
    struct Inner {
        name: &'static str,
    }

    #[test]
    fn flattening() {
        let kv = R { k: 1.5, v: vec![1.0, 2.0], inner: Inner { name: "a" } }.key_values();
        assert_eq!(
            kv,
            vec![
                ("k".to_string(), "1.5".to_string()),
                ("v".to_string(), "[1.0, 2.0]".to_string()),
                ("inner.name".to_string(), "a".to_string()),
            ]
        );
    }
}
