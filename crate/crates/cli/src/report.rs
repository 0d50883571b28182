//! Report documents: a single JSON value per run, with the human-readable
//! text form derived from the JSON rather than computed separately.

use serde_json::Value;

/// Renders the report as indented `key: value` lines, walking the JSON
/// deterministically (object keys are already sorted by the JSON map).
pub fn render_text(value: &Value) -> String {
    let mut out = String::new();
    walk(value, 0, None, &mut out);
    out
}

fn walk(value: &Value, indent: usize, key: Option<&str>, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            if let Some(k) = key {
                out.push_str(&format!("{pad}{k}:\n"));
            }
            for (k, v) in map {
                walk(v, indent + usize::from(key.is_some()), Some(k), out);
            }
        }
        Value::Array(items) => {
            let k = key.unwrap_or("-");
            if items.iter().all(|i| i.is_string() || i.is_number() || i.is_boolean()) {
                let flat: Vec<String> = items.iter().map(scalar_text).collect();
                out.push_str(&format!("{pad}{k}: [{}]\n", flat.join(", ")));
            } else {
                out.push_str(&format!("{pad}{k}:\n"));
                for item in items {
                    walk(item, indent + 1, Some("-"), out);
                }
            }
        }
        scalar => {
            let k = key.unwrap_or("-");
            out.push_str(&format!("{pad}{k}: {}\n", scalar_text(scalar)));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_is_derived_from_json() {
        let v = json!({
            "results": {"mu": "3", "values": ["1", "2"]},
            "verdict": "pass"
        });
        let text = render_text(&v);
        assert!(text.contains("mu: 3"));
        assert!(text.contains("values: [1, 2]"));
        assert!(text.contains("verdict: pass"));
    }
}
