//! Tabular experiment output and its CSV rendering.
//!
//! Floats are serialized with 17 significant digits so files round-trip
//! bit-exactly; reruns with the same config and seed are byte-identical.

use crate::config::ExperimentConfig;

#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub name: String,
    pub describe: String,
}

/// Shorthand column constructor.
pub fn col(name: impl Into<String>, describe: impl Into<String>) -> ColumnSpec {
    ColumnSpec {
        name: name.into(),
        describe: describe.into(),
    }
}

/// In-memory result of one experiment run.
#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: &'static str,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<f64>>,
    /// Extra header comments (calibrated constants and the like).
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &'static str, columns: Vec<ColumnSpec>) -> Self {
        Report {
            experiment,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column values by name; panics on unknown names (programmer error).
    pub fn column(&self, name: &str) -> Vec<f64> {
        let idx = self
            .columns
            .iter()
            .position(|c| c.name == name)
            .unwrap_or_else(|| panic!("no column named {name}"));
        self.rows.iter().map(|r| r[idx]).collect()
    }

    /// 17-significant-digit float form used in every data cell.
    pub fn format_value(x: f64) -> String {
        if x.is_nan() {
            "nan".to_string()
        } else {
            format!("{x:.16e}")
        }
    }

    /// Render the CSV document: `#` header comments (tool version, resolved
    /// config, column docs, notes), then the header row and data rows.
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# kfp-lab {} experiment={}\n",
            env!("CARGO_PKG_VERSION"),
            self.experiment
        ));
        out.push_str(&format!(
            "# config: {}\n",
            cfg.resolved(self.experiment).to_json()
        ));
        for c in &self.columns {
            out.push_str(&format!("# column {}: {}\n", c.name, c.describe));
        }
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| Self::format_value(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Companion schema document describing the columns.
    pub fn schema_text(&self) -> String {
        let mut out = format!("schema for experiment {}\n", self.experiment);
        for c in &self.columns {
            out.push_str(&format!("{}: {}\n", c.name, c.describe));
        }
        out
    }
}
