//! Numeric result tables with CSV and JSON rendering.

use serde::Serialize;

/// How a column is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ColumnKind {
    /// Rendered as a plain integer.
    Int,
    /// Rendered in scientific notation with 17 significant digits.
    Float,
}

/// A rectangular table of numeric results.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub experiment: String,
    pub columns: Vec<(String, ColumnKind)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(experiment: &str, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// CSV with a header row, `,` separator, `.` decimal point, and full
    /// float precision (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.columns)
                .map(|(v, (_, kind))| match kind {
                    ColumnKind::Int => format!("{}", *v as i64),
                    ColumnKind::Float => format!("{v:.16e}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON object with the column metadata and raw rows.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    /// Values of the named column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|(n, _)| n == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_renders_header_ints_and_full_precision_floats() {
        let mut t = Table::new("demo", &[("n", ColumnKind::Int), ("x", ColumnKind::Float)]);
        t.push(vec![3.0, 0.1]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,x"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("3,1.000000000000000"), "{row}");
        // Full precision: parsing the cell recovers the value exactly.
        let cell = row.split(',').nth(1).unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn column_lookup_matches_row_order() {
        let mut t = Table::new("demo", &[("a", ColumnKind::Float), ("b", ColumnKind::Float)]);
        t.push(vec![1.0, 2.0]);
        t.push(vec![3.0, 4.0]);
        assert_eq!(t.column("b"), Some(vec![2.0, 4.0]));
        assert_eq!(t.column("missing"), None);
    }
}
