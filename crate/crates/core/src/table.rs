//! Tabulated scan results and their CSV / JSON encodings.
//!
//! CSV: `#`-prefixed metadata lines (`# key: <json>`), a header line, then
//! one line per row. Numbers use 12 significant digits in scientific
//! notation; missing values are empty cells. The trailing `marker` column
//! is empty for ordinary rows.
//!
//! JSON: `{"config": {...}, "columns": [...], "rows": [[...]], "errors": [...]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "message", rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// The quantity does not exist for this row (not a failure).
    Absent(String),
    /// The computation for this row failed; the scan carried on.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub values: Vec<Option<f64>>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub rows: Vec<ScanRow>,
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct RowNote {
    row: usize,
    #[serde(flatten)]
    status: RowStatus,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    config: BTreeMap<String, Value>,
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    errors: Vec<RowNote>,
}

/// `x` with 12 significant digits, locale independent.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        String::new()
    }
}

impl ScanTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, values: Vec<Option<f64>>, status: RowStatus) {
        assert_eq!(values.len(), self.columns.len(), "row width must match the column count");
        self.rows.push(ScanRow { values, status });
    }

    pub fn push_values(&mut self, values: &[f64]) {
        self.push(values.iter().map(|&v| Some(v)).collect(), RowStatus::Ok);
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("metadata is serializable");
        self.metadata.insert(key.to_string(), value);
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, RowStatus::Failed(_))).count()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            writeln!(out, "# {key}: {value}").unwrap();
        }
        writeln!(out, "{},marker", self.columns.join(",")).unwrap();
        for row in &self.rows {
            for v in &row.values {
                out.push_str(&v.map(format_number).unwrap_or_default());
                out.push(',');
            }
            match &row.status {
                RowStatus::Ok => {}
                RowStatus::Absent(m) => write!(out, "absent: {}", m.replace(',', ";")).unwrap(),
                RowStatus::Failed(m) => write!(out, "error: {}", m.replace(',', ";")).unwrap(),
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let table = JsonTable {
            config: self.metadata.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.values.iter().map(|v| v.filter(|x| x.is_finite())).collect())
                .collect(),
            errors: self
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.status != RowStatus::Ok)
                .map(|(row, r)| RowNote { row, status: r.status.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&table).expect("table is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: JsonTable =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scan table JSON: {e}")))?;
        let mut rows: Vec<ScanRow> = table
            .rows
            .into_iter()
            .map(|values| ScanRow { values, status: RowStatus::Ok })
            .collect();
        for note in table.errors {
            let row = rows
                .get_mut(note.row)
                .ok_or_else(|| Error::Parse(format!("error entry for missing row {}", note.row)))?;
            row.status = note.status;
        }
        if rows.iter().any(|r| r.values.len() != table.columns.len()) {
            return Err(Error::Parse("row width does not match the column count".into()));
        }
        Ok(Self { columns: table.columns, rows, metadata: table.config })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ScanTable {
        let mut t = ScanTable::new(["n", "theta_star"]);
        t.set_meta("tool", "bec-collect");
        t.push_values(&[10.0, 0.032_421_875_123]);
        t.push(vec![Some(1.0), None], RowStatus::Absent("never dominant".into()));
        t.push(vec![Some(5.0), None], RowStatus::Failed("no convergence, sorry".into()));
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# tool: \"bec-collect\"");
        assert_eq!(lines[1], "n,theta_star,marker");
        assert_eq!(lines[2], "1.00000000000e1,3.24218751230e-2,");
        assert_eq!(lines[3], "1.00000000000e0,,absent: never dominant");
        assert_eq!(lines[4], "5.00000000000e0,,error: no convergence; sorry");
        assert_eq!(sample().failed_rows(), 1);
    }

    #[test]
    fn json_keeps_markers() {
        let t = sample();
        let back = ScanTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        for key in ["config", "columns", "rows", "errors"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(ScanTable::from_json("{").is_err());
        let bad = r#"{"config":{},"columns":["a"],"rows":[[1.0, 2.0]],"errors":[]}"#;
        assert!(ScanTable::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn csv_numbers_round_trip_to_twelve_digits(x in -1e12f64..1e12) {
            let parsed: f64 = format_number(x).parse().unwrap();
            prop_assert!((parsed - x).abs() <= 5e-12 * x.abs());
        }

        #[test]
        fn json_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 1..20)) {
            let mut t = ScanTable::new(["x"]);
            for v in &values {
                t.push_values(&[*v]);
            }
            let back = ScanTable::from_json(&t.to_json()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
