//! Report rendering. Numbers are written as decimal strings, keys in sorted
//! order, so equal inputs give byte-identical output.

use serde_json::{json, Map, Value};
use sparsecert_core::extremal::KnotSet;
use sparsecert_core::polynomial::Interval;
use sparsecert_core::SparsePolynomial;

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(num(*x))).collect())
}

pub fn interval(iv: &Interval) -> Value {
    if iv.is_closed() {
        nums(&[iv.left(), iv.right()])
    } else {
        Value::String("half-line".into())
    }
}

pub fn polynomial(p: &SparsePolynomial) -> Value {
    json!({
        "exponents": nums(p.exps().as_slice()),
        "coefficients": nums(p.coeffs()),
    })
}

pub fn knots(ks: &KnotSet) -> Value {
    Value::Array(
        ks.entries()
            .iter()
            .map(|k| json!({ "location": num(k.location), "multiplicity": k.multiplicity }))
            .collect(),
    )
}

pub fn render_json(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports are plain JSON");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match x {
                    Value::Object(_) | Value::Array(_) => flatten(&format!("{prefix}[{i}]"), x, rows),
                    _ => rows.push((prefix.to_string(), i.to_string(), scalar(x))),
                }
            }
        }
        _ => rows.push((prefix.to_string(), String::new(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Long-format table `field,index,value`, one row per scalar of the report.
pub fn render_csv(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let mut out = String::from("field,index,value\n");
    for (f, i, v) in rows {
        out.push_str(&format!("{},{},{}\n", csv_field(&f), i, csv_field(&v)));
    }
    out
}

/// Base object shared by every report.
pub fn header(task: &str, status: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), json!(crate::problem::VERSION));
    m.insert("task".into(), json!(task));
    m.insert("status".into(), json!(status));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.5, -3.25, 1e-9, 123456.0, 2.0f64.sqrt(), 1e300, -7e-310] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1e-9), "1e-9");
    }

    #[test]
    fn csv_flattens_nested_values() {
        let r = json!({"b": {"x": ["1", "2"]}, "a": "q,r", "k": [{"location": "0.5", "multiplicity": 2}]});
        let csv = render_csv(&r);
        assert_eq!(
            csv,
            "field,index,value\na,,\"q,r\"\nb.x,0,1\nb.x,1,2\nk[0].location,,0.5\nk[0].multiplicity,,2\n"
        );
    }
}
