//! Machine-readable report emission. Floats are printed with 17
//! significant digits so identical runs produce byte-identical output.

use serde::Serialize;

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "toeplitz-spectra/1";

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            // NaN and infinities have no JSON representation.
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize a report to deterministic JSON (fixed float formatting,
/// declaration-ordered fields), newline terminated.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits utf-8")
}

/// Flatten a JSON report into deterministic `key,value` CSV lines.
pub fn to_csv<T: Serialize>(value: &T) -> String {
    let json = to_json(value);
    let parsed: serde_json::Value = serde_json::from_str(&json).expect("own output parses");
    let mut rows = Vec::new();
    flatten("", &parsed, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

fn flatten(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar_string(other))),
    }
}

fn scalar_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Demo {
        schema: &'static str,
        n: usize,
        value: f64,
        tiny: f64,
        items: Vec<f64>,
    }

    #[test]
    fn float_formatting_is_fixed_width() {
        let demo = Demo {
            schema: SCHEMA,
            n: 3,
            value: 0.5,
            tiny: 1.25e-13,
            items: vec![1.0, -2.0],
        };
        let a = to_json(&demo);
        let b = to_json(&demo);
        assert_eq!(a, b);
        assert!(a.contains("5.0000000000000000e-1"));
        assert!(a.contains("1.2500000000000000e-13"));
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn csv_flattening() {
        let demo = Demo {
            schema: SCHEMA,
            n: 3,
            value: 0.5,
            tiny: 1.0,
            items: vec![1.0],
        };
        let csv = to_csv(&demo);
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("schema,toeplitz-spectra/1"));
        assert!(csv.contains("items[0],"));
    }
}
