//! Result records and the csv / jsonl / plotdata writers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub timestamp: String,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub outputs: Value,
    pub version: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
    Plotdata,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            "plotdata" => Ok(Format::Plotdata),
            _ => Err(CliError::usage(format!("unknown format `{s}` (csv, jsonl, plotdata)"))),
        }
    }
}

/// Record timestamp: `SOURCE_DATE_EPOCH` if set, else the Unix epoch, so that
/// identical runs produce identical bytes.
pub fn timestamp() -> Result<String, CliError> {
    let secs = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("SOURCE_DATE_EPOCH must be an integer, got `{s}`")))?,
        Err(_) => 0,
    };
    let t = std::time::UNIX_EPOCH + std::time::Duration::from_secs(secs);
    Ok(humantime::format_rfc3339_seconds(t).to_string())
}

/// JSON number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| {
        Value::String(
            if x.is_nan() {
                "nan"
            } else if x > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .into(),
        )
    })
}

fn check_homogeneous(records: &[ResultRecord]) -> Result<(), CliError> {
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.command != first.command) {
            return Err(CliError::usage(format!(
                "records mix commands `{}` and `{}`; write them to separate files",
                first.command, other.command
            )));
        }
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// Flat `(column, value)` pairs in stable order.
fn columns(r: &ResultRecord) -> Vec<(String, String)> {
    let mut cols = vec![
        ("timestamp".to_string(), r.timestamp.clone()),
        ("command".to_string(), r.command.clone()),
        ("version".to_string(), r.version.clone()),
        ("seed".to_string(), r.seed.map(|s| s.to_string()).unwrap_or_default()),
    ];
    for (k, v) in &r.params {
        cols.push((format!("param.{k}"), cell(v)));
    }
    if let Value::Object(map) = &r.outputs {
        for (k, v) in map {
            cols.push((format!("out.{k}"), cell(v)));
        }
    } else {
        cols.push(("out".to_string(), cell(&r.outputs)));
    }
    cols
}

/// Writes `records`; `with_header` controls the csv header and the
/// plotdata column comment.
pub fn write_records(
    records: &[ResultRecord],
    format: Format,
    with_header: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    check_homogeneous(records)?;
    match format {
        Format::Jsonl => {
            for r in records {
                let line = serde_json::to_string(r).map_err(|e| CliError::internal(e.to_string()))?;
                writeln!(out, "{line}")?;
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(out);
            let mut header: Option<Vec<String>> = None;
            for r in records {
                let cols = columns(r);
                let names: Vec<String> = cols.iter().map(|c| c.0.clone()).collect();
                match &header {
                    None => {
                        if with_header {
                            w.write_record(&names).map_err(|e| CliError::internal(e.to_string()))?;
                        }
                        header = Some(names);
                    }
                    Some(h) if *h != names => {
                        return Err(CliError::usage("records have different parameter or output keys"));
                    }
                    _ => {}
                }
                w.write_record(cols.iter().map(|c| c.1.as_str()))
                    .map_err(|e| CliError::internal(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Plotdata => {
            if with_header && !records.is_empty() {
                writeln!(out, "# x\ty\tfit_y")?;
            }
            for (i, r) in records.iter().enumerate() {
                let rows = r.outputs.get("plot").and_then(Value::as_array).ok_or_else(|| {
                    CliError::usage(format!("plotdata needs growth series; `{}` has none", r.command))
                })?;
                if i > 0 {
                    writeln!(out)?;
                }
                for row in rows {
                    let vals: Vec<String> = row.as_array().map(|a| a.iter().map(cell).collect()).unwrap_or_default();
                    writeln!(out, "{}", vals.join("\t"))?;
                }
            }
        }
    }
    Ok(())
}

/// Parses a jsonl stream into records.
pub fn read_jsonl(src: &str) -> Result<Vec<ResultRecord>, CliError> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::usage(format!("line {}: not a result record: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(command: &str, x: f64) -> ResultRecord {
        ResultRecord {
            timestamp: "1970-01-01T00:00:00Z".into(),
            command: command.into(),
            params: [("p".to_string(), Value::from(x))].into_iter().collect(),
            outputs: serde_json::json!({"ratio": 0.1 + x, "verdict": "interior"}),
            version: "0.1.0".into(),
            seed: Some(3),
        }
    }

    #[test]
    fn csv_single_record() {
        let mut buf = Vec::new();
        write_records(&[rec("region", 1.5)], Format::Csv, true, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "timestamp,command,version,seed,param.p,out.ratio,out.verdict");
    }

    #[test]
    fn jsonl_round_trip() {
        let records = vec![rec("region", 1.5), rec("region", 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_records(&records, Format::Jsonl, true, &mut buf).unwrap();
        let back = read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn mixed_commands_rejected() {
        let mut buf = Vec::new();
        let err = write_records(&[rec("region", 1.5), rec("ratio", 1.5)], Format::Jsonl, true, &mut buf).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(num(2.5), Value::from(2.5));
    }
}
