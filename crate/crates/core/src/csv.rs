//! Plain CSV emission for fields sharing one grid.
//!
//! Every real is written as a scientific literal with 12 significant digits,
//! so values survive a write/parse round trip to within one unit in the 12th
//! digit. Rows follow grid order; in 2-D the first axis varies slowest.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Renders `v` with 12 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_csv<W: Write>(fields: &[ScalarField], mut sink: W) -> Result<()> {
    let first = fields
        .first()
        .ok_or_else(|| Error::arg("write_csv needs at least one field"))?;
    if let Some(bad) = fields.iter().find(|f| !f.same_grid(first)) {
        return Err(Error::arg(format!(
            "field `{}` does not share the grid of `{}`",
            bad.label(),
            first.label()
        )));
    }

    let header: Vec<&str> = first
        .axes()
        .iter()
        .map(|a| a.name.as_str())
        .chain(fields.iter().map(|f| f.label()))
        .collect();
    writeln!(sink, "{}", header.join(","))?;

    let axes = first.axes();
    let rows = first.values().len();
    let inner = if axes.len() == 2 {
        axes[1].grid.len()
    } else {
        rows
    };
    let mut line = String::new();
    for r in 0..rows {
        line.clear();
        if axes.len() == 2 {
            line.push_str(&format_real(axes[0].grid.points()[r / inner]));
            line.push(',');
            line.push_str(&format_real(axes[1].grid.points()[r % inner]));
        } else {
            line.push_str(&format_real(axes[0].grid.points()[r]));
        }
        for f in fields {
            line.push(',');
            line.push_str(&format_real(f.values()[r]));
        }
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;
    Ok(())
}

/// Writes a plain numeric table.
pub fn write_table<W: Write>(header: &[String], rows: &[Vec<f64>], mut sink: W) -> Result<()> {
    if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(Error::arg(format!(
            "row {} has {} columns, header has {}",
            bad + 1,
            rows[bad].len(),
            header.len()
        )));
    }
    writeln!(sink, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_real(*v)).collect();
        writeln!(sink, "{}", cells.join(","))?;
    }
    sink.flush()?;
    Ok(())
}

/// Parsed CSV table: header labels and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Parses CSV text produced by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::arg("empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::arg(format!("row {}: {e} in `{s}`", k + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(Error::arg(format!(
                "row {} has {} columns, header has {}",
                k + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
