use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use toml::Value;

/// Flatten `[section] key = value` tables into `section.key` strings.
/// Arrays become comma-separated lists.
pub fn flatten(text: &str) -> Result<BTreeMap<String, String>> {
    let root: toml::Table = text.parse().map_err(|e| anyhow!("config file: {e}"))?;
    let mut out = BTreeMap::new();
    for (section, body) in root {
        let Value::Table(table) = body else {
            bail!("config file: top-level key {section:?} must be a table such as [engine]");
        };
        for (key, value) in table {
            let full = format!("{section}.{key}");
            out.insert(full.clone(), scalar(&full, &value)?);
        }
    }
    Ok(out)
}

fn scalar(key: &str, value: &Value) -> Result<String> {
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) if f.is_infinite() => "inf".into(),
        Value::Float(f) => format!("{f:?}"),
        Value::Boolean(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Array(_) | Value::Table(_) => Err(anyhow!("{key}: nested values are not allowed")),
                v => scalar(key, v),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => bail!("{key}: unsupported value {value}"),
    })
}
