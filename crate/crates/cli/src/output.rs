//! CSV and JSON rendering of result tables.

use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::run::{Cell, Table};

fn number(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Header line plus one line per row. Floats use the shortest representation
/// that round-trips.
pub fn csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => number(*v),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    config: &'a RunConfig,
    passed: bool,
    columns: &'a [&'static str],
    rows: &'a [Vec<Cell>],
}

/// JSON document echoing the resolved configuration next to the table.
/// Non-finite numbers become `null`.
pub fn doc(cfg: &RunConfig, table: &Table) -> serde_json::Result<String> {
    let d = Document {
        schema_version: SCHEMA_VERSION,
        config: cfg,
        passed: table.passed,
        columns: &table.columns,
        rows: &table.rows,
    };
    let mut s = serde_json::to_string_pretty(&d)?;
    s.push('\n');
    Ok(s)
}
