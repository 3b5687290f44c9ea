//! Report shape shared by all experiments, plus JSON and CSV rendering.
//!
//! JSON carries the full report (config echo, rows, fits, flags) with keys
//! in a fixed order, so identical runs serialize to identical bytes. CSV
//! carries the rows only: a header line and one line per data row, with
//! floats printed in full round-trip precision.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Serialize, Debug)]
pub struct Report {
    pub config: BTreeMap<String, String>,
    pub rows: Rows,
    pub fits: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

#[derive(Serialize, Debug)]
pub struct Rows {
    pub columns: Vec<String>,
    pub data: Vec<Vec<Cell>>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    /// Wraps a float, spelling out non-finite values so JSON stays valid.
    pub fn num(v: f64) -> Cell {
        if v.is_finite() {
            Cell::Num(v)
        } else if v.is_nan() {
            Cell::Text("nan".to_string())
        } else if v > 0.0 {
            Cell::Text("inf".to_string())
        } else {
            Cell::Text("-inf".to_string())
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => csv_quote(s),
        }
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl Rows {
    pub fn new(columns: &[&str]) -> Rows {
        Rows { columns: columns.iter().map(|c| c.to_string()).collect(), data: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.data.push(row);
    }
}

impl Report {
    pub fn new(config: BTreeMap<String, String>, rows: Rows) -> Report {
        Report { config, rows, fits: BTreeMap::new(), flags: BTreeMap::new() }
    }

    /// True when every pass/fail flag is set.
    pub fn passed(&self) -> bool {
        self.flags.values().all(|&v| v)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.rows.columns.iter().map(|c| csv_quote(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows.data {
            out.push_str(&row.iter().map(|c| c.csv_field()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip_exactly() {
        let values = [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -4.9e-324];
        for &v in &values {
            let printed = Cell::num(v).csv_field();
            let back: f64 = printed.parse().unwrap();
            assert_eq!(back, v, "{printed}");
        }
    }

    #[test]
    fn csv_quotes_awkward_text() {
        assert_eq!(csv_quote("plain"), "plain");
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
        assert_eq!(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn non_finite_cells_become_text() {
        assert_eq!(Cell::num(f64::INFINITY), Cell::Text("inf".into()));
        assert_eq!(Cell::num(f64::NEG_INFINITY), Cell::Text("-inf".into()));
        assert_eq!(Cell::num(f64::NAN), Cell::Text("nan".into()));
    }

    #[test]
    fn report_json_has_fixed_key_order() {
        let mut config = BTreeMap::new();
        config.insert("experiment".to_string(), "demo".to_string());
        let mut report = Report::new(config, Rows::new(&["x"]));
        report.rows.push(vec![Cell::Int(1)]);
        report.flags.insert("ok".to_string(), true);
        let json = report.to_json();
        let c = json.find("\"config\"").unwrap();
        let r = json.find("\"rows\"").unwrap();
        let f = json.find("\"fits\"").unwrap();
        let g = json.find("\"flags\"").unwrap();
        assert!(c < r && r < f && f < g);
    }
}
