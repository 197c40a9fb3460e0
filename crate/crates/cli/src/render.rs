//! Plain-text rendering of the JSON reports.
//!
//! Matrices (`{rows, cols, entries}`) are abbreviated to their shape and arrays
//! of flat objects become aligned tables; everything else is `key: value`.

use serde_json::{Map, Value};

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    block(&mut out, v, 0);
    out
}

fn is_matrix(m: &Map<String, Value>) -> bool {
    m.len() == 3 && m.contains_key("rows") && m.contains_key("cols") && m.contains_key("entries")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if is_matrix(m) => Some(format!("<{}x{} matrix>", m["rows"], m["cols"])),
        Value::Object(m) if m.is_empty() => Some("{}".into()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::String(_) | Value::Bool(_))) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn flat_rows(a: &[Value]) -> Option<Vec<&Map<String, Value>>> {
    let rows: Vec<_> = a.iter().map(Value::as_object).collect::<Option<_>>()?;
    let first = rows.first()?;
    let keys: Vec<&String> = first.keys().collect();
    let ok = rows
        .iter()
        .all(|r| r.keys().collect::<Vec<_>>() == keys && r.values().all(|v| scalar(v).is_some()));
    ok.then_some(rows)
}

fn table(out: &mut String, rows: &[&Map<String, Value>], indent: usize) {
    let keys: Vec<&String> = rows[0].keys().collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.values().map(|v| scalar(v).unwrap_or_default()).collect())
        .collect();
    let width: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| cells.iter().map(|c| c[i].chars().count()).chain([k.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |out: &mut String, items: Vec<&str>| {
        let padded: Vec<String> = items.iter().zip(&width).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(&" ".repeat(indent));
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(out, keys.iter().map(|k| k.as_str()).collect());
    for c in &cells {
        line(out, c.iter().map(String::as_str).collect());
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) if !is_matrix(m) => {
            for (k, x) in m {
                if let Some(s) = scalar(x) {
                    out.push_str(&format!("{pad}{k}: {s}\n"));
                    continue;
                }
                out.push_str(&format!("{pad}{k}:\n"));
                block(out, x, indent + 2);
            }
        }
        Value::Array(a) => {
            if let Some(rows) = flat_rows(a) {
                table(out, &rows, indent);
                return;
            }
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        block(out, x, indent + 2);
                    }
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_tables_and_matrices() {
        let v = json!({
            "case": "main_ii",
            "m": {"rows": 2, "cols": 3, "entries": [[1, 0, 0], [0, 1, 0]]},
            "rows": [{"subgroup": "1", "H^0": "0"}, {"subgroup": "<x>", "H^0": "Z/2"}],
            "nested": {"list": [1, 2]}
        });
        assert_eq!(
            text(&v),
            "case: main_ii\nm: <2x3 matrix>\nrows:\n  subgroup  H^0\n  1         0\n  <x>       Z/2\nnested:\n  list: [1, 2]\n"
        );
    }
}
