//! JSON reports with floats printed at 17 significant digits.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;

use crate::error::CliError;

/// `serde_json` formatter writing every `f64` as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with [`SciFormatter`].
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Formats one float the way reports and CSV files do.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ErrorInfo {
    pub name: String,
    pub module: String,
    pub message: String,
}

/// Report of one command run.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, Value>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            metrics: BTreeMap::new(),
            status: "ok".to_string(),
            error: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }

    pub fn metric_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }

    pub fn fail(&mut self, err: &CliError) -> &mut Self {
        self.status = "fail".to_string();
        self.error = Some(ErrorInfo {
            name: err.name().to_string(),
            module: err.module().to_string(),
            message: err.to_string(),
        });
        self
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let mut r = Report::new("residual");
        r.metric("max", 0.1).metric("n", 3);
        let s = r.to_json();
        assert!(s.contains("\"max\":1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\":3"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["metrics"]["max"].as_f64(), Some(0.1));
    }
}
