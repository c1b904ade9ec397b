//! Check records and their CSV/JSON serializations.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::LabError;

pub const VERSION: &str = concat!("kenergy ", env!("CARGO_PKG_VERSION"));

/// Non-finite floats are written as the strings `"NaN"`, `"inf"`, `"-inf"`
/// so that reports of failed checks still round-trip through JSON.
mod lossless {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    #[serde(with = "lossless")]
    pub value: f64,
    #[serde(with = "lossless")]
    pub tolerance: f64,
    pub pass: bool,
}

impl PartialEq for Check {
    fn eq(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| a == b || (a.is_nan() && b.is_nan());
        self.check == other.check && same(self.value, other.value) && same(self.tolerance, other.tolerance) && self.pass == other.pass
    }
}

impl Check {
    /// Passes when `value ≤ tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { check: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// Passes when `value ≥ bound`; the bound goes in the tolerance column.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { check: name.into(), value, tolerance: bound, pass: value >= bound }
    }

    /// A computation that failed outright.
    pub fn failed(name: impl Into<String>) -> Self {
        Check { check: name.into(), value: f64::NAN, tolerance: f64::NAN, pass: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub suite: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: serde_json::Value) -> Self {
        Report { version: VERSION.to_string(), suite: suite.into(), config, checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `0` when every check passes, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), LabError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["check", "value", "tolerance", "pass"])?;
        for c in &self.checks {
            out.write_record([c.check.clone(), c.value.to_string(), c.tolerance.to_string(), c.pass.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, LabError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn render(&self, format: Format) -> Result<String, LabError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn export(&self, path: &std::path::Path, format: Format) -> Result<(), LabError> {
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }
}
