//! Rendering results as an aligned table, JSON, or CSV.
//!
//! Every command hands over a serializable value: one record or a list of
//! flat records. JSON prints it as is. CSV and the table walk the same JSON
//! value, so all three carry identical numbers; only the table rounds them.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// Formats `x` to `digits` significant figures, switching to exponent
/// notation outside `[1e-3, 1e6)`.
pub fn format_significant(x: f64, digits: u8) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let digits = usize::from(digits.max(1));
    let sci = format!("{:.*e}", digits - 1, x);
    let exponent: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    if (-3..6).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn records(value: &Value) -> Vec<&serde_json::Map<String, Value>> {
    match value {
        Value::Object(map) => vec![map],
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        _ => Vec::new(),
    }
}

fn header(rows: &[&serde_json::Map<String, Value>]) -> Vec<String> {
    let mut columns: Vec<String> = Vec::new();
    for row in rows {
        for key in row.keys() {
            if !columns.contains(key) {
                columns.push(key.clone());
            }
        }
    }
    columns
}

fn cell(value: Option<&Value>, precision: Option<u8>) -> String {
    match value {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => match (precision, n.as_f64()) {
            (Some(digits), Some(x)) if !(n.is_u64() || n.is_i64()) => format_significant(x, digits),
            _ => n.to_string(),
        },
        Some(other) => other.to_string(),
    }
}

/// Writes `value` in the requested format. `notes` are extra lines shown
/// under the table; the structured formats leave them out.
pub fn emit<T: Serialize>(
    out: &mut dyn Write,
    format: Format,
    precision: u8,
    value: &T,
    notes: &[String],
) -> Result<(), CliError> {
    let json = serde_json::to_value(value)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &json)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let rows = records(&json);
            let columns = header(&rows);
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(&columns)?;
            for row in &rows {
                writer.write_record(columns.iter().map(|c| cell(row.get(c), None)))?;
            }
            writer.flush()?;
        }
        Format::Table => {
            let rows = records(&json);
            let columns = header(&rows);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    columns
                        .iter()
                        .map(|c| match cell(row.get(c), Some(precision)) {
                            s if s.is_empty() => "-".to_owned(),
                            s => s,
                        })
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = columns
                .iter()
                .enumerate()
                .map(|(i, c)| body.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&columns))?;
            for row in &body {
                writeln!(out, "{}", line(row))?;
            }
            for note in notes {
                writeln!(out, "{note}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_figures() {
        assert_eq!(format_significant(1.99e-7, 3), "1.99e-7");
        assert_eq!(format_significant(1.25e-7, 3), "1.25e-7");
        assert_eq!(format_significant(1.375, 3), "1.38");
        assert_eq!(format_significant(1.375, 4), "1.375");
        assert_eq!(format_significant(3.0, 3), "3.00");
        assert_eq!(format_significant(0.4583333, 3), "0.458");
        assert_eq!(format_significant(0.0009996, 3), "0.00100");
        assert_eq!(format_significant(0.00009, 3), "9.00e-5");
        assert_eq!(format_significant(0.9996, 3), "1.00");
        assert_eq!(format_significant(123456.0, 3), "123456");
        assert_eq!(format_significant(1.2e7, 2), "1.2e7");
        assert_eq!(format_significant(0.0, 3), "0");
        assert_eq!(format_significant(-0.028, 2), "-0.028");
    }

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        x: f64,
        n: u32,
        missing: Option<f64>,
    }

    fn render(format: Format) -> String {
        let rows = [
            Row {
                name: "a, \"quoted\"",
                x: 0.1 + 0.2,
                n: 3,
                missing: None,
            },
            Row {
                name: "b",
                x: 1e-9,
                n: 10,
                missing: Some(2.5),
            },
        ];
        let mut out = Vec::new();
        emit(&mut out, format, 3, &rows, &["note".into()]).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn csv_quotes_and_keeps_full_precision() {
        let csv = render(Format::Csv);
        assert_eq!(
            csv,
            "name,x,n,missing\n\"a, \"\"quoted\"\"\",0.30000000000000004,3,\nb,1e-9,10,2.5\n"
        );
    }

    #[test]
    fn table_rounds_and_shows_notes() {
        let table = render(Format::Table);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].contains("0.300") && lines[1].ends_with('-'));
        assert!(lines[2].contains("1.00e-9"));
        assert_eq!(lines[3], "note");
    }

    #[test]
    fn json_is_lossless() {
        let v: Value = serde_json::from_str(&render(Format::Json)).unwrap();
        assert_eq!(v[0]["x"].as_f64(), Some(0.1 + 0.2));
        assert!(v[0]["missing"].is_null());
    }
}
