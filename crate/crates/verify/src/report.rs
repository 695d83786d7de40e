//! Check reports and their JSON/CSV serialization.
//!
//! Floats are written as `{:.16e}` (17 significant digits), non-finite floats as `null` in
//! JSON and as an empty field in CSV, and complex values as `[re, im]`. Identical reports
//! serialize to identical bytes.

use num_complex::Complex64;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::Path;
use std::str::FromStr;

use crate::error::VerifyError;

/// A real or complex quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(Complex64),
}

impl Value {
    pub fn abs(&self) -> f64 {
        match self {
            Value::Real(x) => x.abs(),
            Value::Complex(c) => c.norm(),
        }
    }

    pub fn re(&self) -> f64 {
        match self {
            Value::Real(x) => *x,
            Value::Complex(c) => c.re,
        }
    }

    pub fn im(&self) -> f64 {
        match self {
            Value::Real(_) => 0.0,
            Value::Complex(c) => c.im,
        }
    }

    pub fn distance(&self, other: &Value) -> f64 {
        (Complex64::new(self.re(), self.im()) - Complex64::new(other.re(), other.im())).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<Complex64> for Value {
    fn from(c: Complex64) -> Self {
        Value::Complex(c)
    }
}

/// Fixed 17-significant-digit rendering, `None` for non-finite input.
pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

fn json_number(x: f64) -> serde_json::Value {
    match format_float(x) {
        Some(s) => serde_json::Value::Number(
            serde_json::Number::from_str(&s).expect("formatted float parses"),
        ),
        None => serde_json::Value::Null,
    }
}

fn number_from_json<E: serde::de::Error>(v: &serde_json::Value) -> Result<f64, E> {
    match v {
        serde_json::Value::Null => Ok(f64::NAN),
        serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| E::custom("number out of range")),
        other => Err(E::custom(format!("expected number, found {other}"))),
    }
}

fn serialize_float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    json_number(*x).serialize(s)
}

fn deserialize_float<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    number_from_json(&serde_json::Value::deserialize(d)?)
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Real(x) => json_number(*x).serialize(s),
            Value::Complex(c) => [json_number(c.re), json_number(c.im)].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Array(parts) if parts.len() == 2 => Ok(Value::Complex(
                Complex64::new(number_from_json(&parts[0])?, number_from_json(&parts[1])?),
            )),
            v => Ok(Value::Real(number_from_json(&v)?)),
        }
    }
}

/// How `observed` is judged against `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// |observed - expected| ≤ tol.
    Equal,
    /// observed ≤ expected + tol.
    AtMost,
    /// Recorded only; never affects the exit status.
    Diagnostic,
}

impl Comparison {
    fn label(&self) -> &'static str {
        match self {
            Comparison::Equal => "equal",
            Comparison::AtMost => "at-most",
            Comparison::Diagnostic => "diagnostic",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "equal" => Some(Comparison::Equal),
            "at-most" => Some(Comparison::AtMost),
            "diagnostic" => Some(Comparison::Diagnostic),
            _ => None,
        }
    }
}

/// One evaluated check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub anchor: String,
    pub expected: Value,
    pub provenance: String,
    pub observed: Value,
    #[serde(
        serialize_with = "serialize_float",
        deserialize_with = "deserialize_float"
    )]
    pub stderr: f64,
    #[serde(
        serialize_with = "serialize_float",
        deserialize_with = "deserialize_float"
    )]
    pub tol: f64,
    pub pass: bool,
    #[serde(
        serialize_with = "serialize_float",
        deserialize_with = "deserialize_float"
    )]
    pub seconds: f64,
    pub comparison: Comparison,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Whether the check counts towards the exit status.
    pub fn is_diagnostic(&self) -> bool {
        self.comparison == Comparison::Diagnostic
    }
}

fn serialize_opt_float<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => json_number(*v).serialize(s),
        None => s.serialize_none(),
    }
}

fn deserialize_opt_float<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match serde_json::Value::deserialize(d)? {
        serde_json::Value::Null => Ok(None),
        v => number_from_json(&v).map(Some),
    }
}

/// The configuration echoed into a report; `null` marks a suite default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n: Option<usize>,
    #[serde(
        serialize_with = "serialize_opt_float",
        deserialize_with = "deserialize_opt_float"
    )]
    pub alpha: Option<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
    #[serde(
        serialize_with = "serialize_opt_float",
        deserialize_with = "deserialize_opt_float"
    )]
    pub kappa: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: ReportConfig,
    pub checks: Vec<CheckReport>,
    pub all_pass: bool,
}

impl Report {
    pub fn new(suite: &str, config: ReportConfig, checks: Vec<CheckReport>) -> Self {
        let all_pass = checks.iter().filter(|c| !c.is_diagnostic()).all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            config,
            checks,
            all_pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.is_diagnostic() && !c.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(VerifyError::Config(format!(
                "unknown format '{other}' (expected json or csv)"
            ))),
        }
    }
}

pub const CSV_HEADER: [&str; 14] = [
    "suite",
    "id",
    "anchor",
    "expected_re",
    "expected_im",
    "provenance",
    "observed_re",
    "observed_im",
    "stderr",
    "tol",
    "pass",
    "seconds",
    "comparison",
    "note",
];

fn csv_float(x: f64) -> String {
    format_float(x).unwrap_or_default()
}

fn csv_parts(v: &Value) -> (String, String) {
    match v {
        Value::Real(x) => (csv_float(*x), String::new()),
        Value::Complex(c) => (csv_float(c.re), csv_float(c.im)),
    }
}

pub fn to_json(report: &Report) -> Result<String, VerifyError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(report: &Report) -> Result<String, VerifyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for c in &report.checks {
        let (er, ei) = csv_parts(&c.expected);
        let (or, oi) = csv_parts(&c.observed);
        w.write_record([
            report.suite.as_str(),
            &c.id,
            &c.anchor,
            &er,
            &ei,
            &c.provenance,
            &or,
            &oi,
            &csv_float(c.stderr),
            &csv_float(c.tol),
            if c.pass { "true" } else { "false" },
            &csv_float(c.seconds),
            c.comparison.label(),
            c.note.as_deref().unwrap_or(""),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| VerifyError::Io {
        path: "<memory>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(report: &Report, format: Format) -> Result<String, VerifyError> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(
    report: &Report,
    format: Format,
    path: Option<&Path>,
) -> Result<(), VerifyError> {
    let text = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| VerifyError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn parse_json(text: &str) -> Result<Report, VerifyError> {
    Ok(serde_json::from_str(text)?)
}

fn parse_csv_float(s: &str) -> Result<f64, VerifyError> {
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse()
        .map_err(|_| VerifyError::Parse(format!("bad number '{s}'")))
}

fn parse_csv_value(re: &str, im: &str) -> Result<Value, VerifyError> {
    if im.is_empty() && !re.is_empty() {
        Ok(Value::Real(parse_csv_float(re)?))
    } else {
        Ok(Value::Complex(Complex64::new(
            parse_csv_float(re)?,
            parse_csv_float(im)?,
        )))
    }
}

/// Parses the check rows of a CSV report, returning the suite name and the checks.
pub fn parse_csv(text: &str) -> Result<(String, Vec<CheckReport>), VerifyError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut suite = String::new();
    let mut checks = Vec::new();
    for row in r.records() {
        let row = row?;
        let f = |k: usize| row.get(k).unwrap_or("");
        suite = f(0).to_string();
        checks.push(CheckReport {
            id: f(1).to_string(),
            anchor: f(2).to_string(),
            expected: parse_csv_value(f(3), f(4))?,
            provenance: f(5).to_string(),
            observed: parse_csv_value(f(6), f(7))?,
            stderr: parse_csv_float(f(8))?,
            tol: parse_csv_float(f(9))?,
            pass: f(10) == "true",
            seconds: parse_csv_float(f(11))?,
            comparison: Comparison::parse(f(12))
                .ok_or_else(|| VerifyError::Parse(format!("bad comparison '{}'", f(12))))?,
            note: Some(f(13).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok((suite, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let check = |id: &str, obs: Value| CheckReport {
            id: id.into(),
            anchor: "anchor".into(),
            expected: Value::Real(std::f64::consts::PI),
            provenance: "closed-form".into(),
            observed: obs,
            stderr: 1.0 / 3.0,
            tol: 1e-10,
            pass: true,
            seconds: 0.25,
            comparison: Comparison::Equal,
            note: None,
        };
        Report::new(
            "identities",
            ReportConfig {
                n: Some(2),
                alpha: None,
                samples: None,
                seed: 42,
                kappa: Some(-0.5),
            },
            vec![
                check("a", Value::Real(3.0)),
                check("b", Value::Complex(Complex64::new(0.1, -2.0 / 7.0))),
                check("c", Value::Real(f64::NAN)),
            ],
        )
    }

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(format_float(0.1).unwrap(), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::INFINITY), None);
        let json = to_json(&sample()).unwrap();
        assert!(json.contains("3.1415926535897931e+0"));
        assert!(json.contains("null"));
    }

    #[test]
    fn json_round_trip() {
        let mut r = sample();
        r.checks.pop();
        let back = parse_json(&to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back).unwrap(), to_json(&r).unwrap());
    }

    #[test]
    fn nan_survives_as_null() {
        let back = parse_json(&to_json(&sample()).unwrap()).unwrap();
        assert!(back.checks[2].observed.re().is_nan());
    }

    #[test]
    fn csv_round_trip() {
        let mut r = sample();
        r.checks.pop();
        let (suite, checks) = parse_csv(&to_csv(&r).unwrap()).unwrap();
        assert_eq!(suite, "identities");
        assert_eq!(checks, r.checks);
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new(
            "metric",
            ReportConfig {
                n: None,
                alpha: None,
                samples: None,
                seed: 1,
                kappa: None,
            },
            vec![],
        );
        assert!(r.all_pass);
        assert_eq!(parse_json(&to_json(&r).unwrap()).unwrap(), r);
        assert_eq!(parse_csv(&to_csv(&r).unwrap()).unwrap().1, vec![]);
    }

    #[test]
    fn diagnostics_do_not_fail_reports() {
        let mut r = sample();
        r.checks[0].pass = false;
        r.checks[0].comparison = Comparison::Diagnostic;
        let r = Report::new(&r.suite, r.config, r.checks);
        assert!(r.all_pass);
    }

    proptest::proptest! {
        #[test]
        fn finite_values_survive_both_formats(re in proptest::num::f64::NORMAL, im in proptest::num::f64::NORMAL, complex: bool) {
            let v = if complex { Value::Complex(num_complex::Complex64::new(re, im)) } else { Value::Real(re) };
            let report = Report::new("metric", sample().config, vec![CheckReport { observed: v, ..sample().checks[0].clone() }]);
            proptest::prop_assert_eq!(&parse_json(&to_json(&report).unwrap()).unwrap(), &report);
            let (_, checks) = parse_csv(&to_csv(&report).unwrap()).unwrap();
            proptest::prop_assert_eq!(checks, report.checks);
        }
    }
}
