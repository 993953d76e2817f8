//! Deterministic artifact emission: significant-digit cell formatting, CSV
//! with a `#` provenance header embedding the resolved config, and JSON with
//! stable key order.

use crate::config::{FormatName, RunConfig};
use crate::error::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// `digits`-significant-digit scientific form. Negative zero normalizes to
/// zero so equal values always print identically.
pub fn fmt_sig(value: f64, digits: u8) -> String {
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{:.*e}", digits.max(1) as usize - 1, value)
}

/// One table cell; the artifact format decides its rendering.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn csv(&self, digits: u8) -> String {
        match *self {
            Cell::Num(v) => fmt_sig(v, digits),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            // Non-finite values have no JSON number form; null keeps the
            // row shape instead of aborting the artifact.
            Cell::Num(v) => serde_json::Number::from_f64(v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Int(i) => i.into(),
            Cell::Bool(b) => b.into(),
        }
    }
}

/// A fixed-column artifact table.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Render `table` in the configured format and write it to the configured
/// destination. `extras` are command arguments that shape the artifact and
/// so belong in the provenance header alongside the config.
pub fn emit_table(
    config: &RunConfig,
    command: &str,
    extras: &[(&str, String)],
    table: &Table,
) -> Result<(), CliError> {
    let rendered = match config.output.format {
        FormatName::Csv => render_csv(config, command, extras, table),
        FormatName::Json => render_table_json(table),
    };
    emit(config.output.path.as_deref(), &rendered)
}

fn render_csv(config: &RunConfig, command: &str, extras: &[(&str, String)], table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# quenchlab {command}\n"));
    for (key, value) in extras {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out.push_str("#\n");
    for line in config.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str(&format!("# {line}\n"));
        }
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    let digits = config.output.precision;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|cell| cell.csv(digits)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// JSON form of a table: explicit column list plus rows as arrays, so key
/// order never depends on a map implementation.
fn render_table_json(table: &Table) -> String {
    #[derive(Serialize)]
    struct Artifact<'a> {
        columns: &'static [&'static str],
        rows: &'a [Vec<serde_json::Value>],
    }
    let rows: Vec<Vec<serde_json::Value>> =
        table.rows.iter().map(|row| row.iter().map(Cell::json).collect()).collect();
    render_json(&Artifact { columns: table.columns, rows: &rows })
}

/// Pretty-printed JSON with a trailing newline; struct field order is the
/// key order.
pub fn render_json<T: Serialize>(artifact: &T) -> String {
    let mut text = serde_json::to_string_pretty(artifact).expect("artifacts hold no non-finite numbers");
    text.push('\n');
    text
}

/// Write to the path, or stdout when none is configured.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting_is_scientific_and_signed() {
        assert_eq!(fmt_sig(0.2, 17), "2.0000000000000001e-1");
        assert_eq!(fmt_sig(-1.5, 3), "-1.50e0");
        assert_eq!(fmt_sig(0.0, 17), "0.0000000000000000e0");
        assert_eq!(fmt_sig(-0.0, 17), "0.0000000000000000e0");
    }

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for &v in &[std::f64::consts::PI, 0.1, 2.0f64.powi(-40), -7.25e-300] {
            let parsed: f64 = fmt_sig(v, 17).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn non_finite_cells_render_as_json_null() {
        assert_eq!(Cell::Num(f64::NAN).json(), serde_json::Value::Null);
        assert_eq!(Cell::Num(1.0).json(), serde_json::json!(1.0));
        assert_eq!(Cell::Bool(true).json(), serde_json::json!(true));
    }
}
