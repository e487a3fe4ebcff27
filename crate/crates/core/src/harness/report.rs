use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::harness::scan::LemmaReport;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    Json,
    #[default]
    Table,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?}"))),
        }
    }
}

/// Text rendering of results. JSON is pretty-printed with fields in
/// declaration order; the default table flattens the JSON into one
/// `key  value` row per leaf.
pub trait Render: Serialize {
    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    fn to_table(&self) -> String {
        let value = serde_json::to_value(self).expect("results serialize");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Table => self.to_table(),
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(&join(k), x, rows);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, rows);
            }
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        _ => rows.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

pub const REPORT_HEADER: [&str; 5] = ["check", "tested", "passed", "failed", "unknown"];

impl Render for LemmaReport {
    /// One row per check, then one row per failure. An empty report is the header alone.
    fn to_table(&self) -> String {
        let mut rows: Vec<[String; 5]> = vec![REPORT_HEADER.map(String::from)];
        for (name, c) in &self.checks {
            rows.push([name.clone(), c.tested.to_string(), c.passed.to_string(), (c.tested - c.passed).to_string(), c.unknown.to_string()]);
        }
        let mut w = [0usize; 5];
        for r in &rows {
            for (i, cell) in r.iter().enumerate() {
                w[i] = w[i].max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for r in &rows {
            let _ = writeln!(out, "{:<a$}  {:>b$}  {:>c$}  {:>d$}  {:>e$}", r[0], r[1], r[2], r[3], r[4], a = w[0], b = w[1], c = w[2], d = w[3], e = w[4]);
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "{}: {} tested, {} passed, {} unknown, bound {}, {:.2}s", self.lemma_id, self.tested, self.passed, self.unknown, self.bound, self.wall_time);
        }
        for f in &self.failures {
            let _ = writeln!(out, "FAIL {} {}: expected {}, got {}", f.check, f.input, f.expected, f.got);
        }
        out
    }
}

macro_rules! plain_render {
    ($($t:ty),* $(,)?) => { $(impl Render for $t {})* };
}

plain_render!(
    crate::quadratic::PellSolution,
    crate::quadratic::ClassData,
    crate::unit_lattice::Decomposition,
    crate::unit_lattice::UnitIndex,
    crate::unit_lattice::HasseReport,
    crate::unit_lattice::CmUnitIndex,
    crate::iwasawa::SplittingReport,
    crate::iwasawa::KidaInput,
    crate::tower::TowerPrediction,
    crate::tower::PiCandidates,
    crate::tower::Classification,
    crate::kuroda::PairKuroda,
    crate::kuroda::FieldH2,
    Value,
);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::predict;

    #[test]
    fn empty_report_table_is_header() {
        let t = LemmaReport::empty("kida", 10).to_table();
        assert_eq!(t.lines().count(), 1);
        assert!(t.starts_with("check"));
    }

    #[test]
    fn report_json_has_failures() {
        let v: Value = serde_json::from_str(&LemmaReport::empty("kida", 10).to_json()).unwrap();
        assert_eq!(v["failures"], serde_json::json!([]));
    }

    #[test]
    fn prediction_json() {
        let v: Value = serde_json::from_str(&predict(33, 1).unwrap().to_json()).unwrap();
        assert_eq!(v["cl2_type"], serde_json::json!(["2", "4"]));
        let t = predict(33, 1).unwrap().to_table();
        assert!(t.lines().any(|l| l.starts_with("cl2_type") && l.ends_with("[2, 4]")), "{t}");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
