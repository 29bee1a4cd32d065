use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::OutputFormat;

pub const TOOL: &str = "pierce-lab";

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub precision_bits: u32,
    pub rng: Option<&'static str>,
}

impl Provenance {
    pub fn new(precision_bits: u32) -> Self {
        Provenance {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            precision_bits,
            rng: None,
        }
    }
}

/// One report object. Keys serialize in sorted order.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub results: Value,
    pub provenance: Provenance,
}

/// Writes envelopes as JSON lines or as `record,path,value` CSV rows.
pub struct Sink<W: Write> {
    out: W,
    format: OutputFormat,
    records: usize,
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, format: OutputFormat) -> Self {
        Sink {
            out,
            format,
            records: 0,
        }
    }

    pub fn emit(&mut self, env: &ReportEnvelope) -> std::io::Result<()> {
        let value = serde_json::to_value(env).expect("reports serialize to JSON");
        match self.format {
            OutputFormat::Json => {
                writeln!(
                    self.out,
                    "{}",
                    serde_json::to_string(&value).expect("JSON values serialize")
                )?;
            }
            OutputFormat::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut self.out);
                if self.records == 0 {
                    w.write_record(["record", "path", "value"])?;
                }
                let mut rows = Vec::new();
                flatten("", &value, &mut rows);
                let record = self.records.to_string();
                for (path, leaf) in rows {
                    w.write_record([record.as_str(), path.as_str(), leaf.as_str()])?;
                }
                w.flush()?;
            }
        }
        self.records += 1;
        Ok(())
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(k), child, rows);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), child, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn envelope() -> ReportEnvelope {
        ReportEnvelope {
            command: "expand".into(),
            params: BTreeMap::from([("x".to_string(), "7/10".to_string())]),
            results: json!({"zeta": ["1", "3"], "alpha": {"b": null, "a": 2}}),
            provenance: Provenance::new(64),
        }
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut buf = Vec::new();
        Sink::new(&mut buf, OutputFormat::Json).emit(&envelope()).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let a = line.find("\"alpha\"").unwrap();
        let z = line.find("\"zeta\"").unwrap();
        assert!(a < z);
        assert!(line.find("\"command\"").unwrap() < line.find("\"params\"").unwrap());
        assert!(line.ends_with('\n'));
    }

    #[test]
    fn csv_flattens_paths() {
        let mut buf = Vec::new();
        let mut sink = Sink::new(&mut buf, OutputFormat::Csv);
        sink.emit(&envelope()).unwrap();
        sink.emit(&envelope()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("record,path,value\n"));
        assert!(text.contains("0,results.zeta.1,3\n"));
        assert!(text.contains("1,results.alpha.a,2\n"));
        assert_eq!(text.matches("record,path,value").count(), 1);
    }
}
