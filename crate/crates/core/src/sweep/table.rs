//! Tabular output: CSV with a fixed header or JSON lines with a leading
//! metadata object.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::SweepSpec;
use crate::error::{Error, Result};
use crate::homodyne::SpectrumComponents;

pub const NORMALIZATION: &str = "rho = 2(omega - omega_m)/Gamma; p = probe power / on-resonance SQL power \
(cooperativity p/4); displacement PSDs in units where zero-point motion contributes |chi_m(rho)|^2 \
(1 on mechanical resonance); light PSDs in shot-noise units; angles in degrees";

/// Columns of a [`SpectrumTable`], in output order.
pub const SPECTRUM_COLUMNS: [&str; 10] = [
    "rho",
    "phi_used",
    "p",
    "s_m",
    "s_ii",
    "s_ff",
    "s_corr",
    "s_ln",
    "total",
    "total_over_sql",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv or jsonl)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub name: String,
    pub version: String,
    pub normalization: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SweepSpec>,
    /// Scalar parameters and derived values that apply to the whole table.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub columns: Vec<String>,
}

impl TableMetadata {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            normalization: NORMALIZATION.to_string(),
            spec: None,
            parameters: BTreeMap::new(),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Named columns of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub metadata: TableMetadata,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn new(metadata: TableMetadata) -> Self {
        Self {
            metadata,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.metadata.columns
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.metadata.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.metadata.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub rho: f64,
    /// Degrees.
    pub phi_used: f64,
    pub p: f64,
    pub s_m: f64,
    pub s_ii: f64,
    pub s_ff: f64,
    pub s_corr: f64,
    pub s_ln: f64,
    pub total: f64,
    pub total_over_sql: f64,
}

impl SpectrumRow {
    pub fn new(rho: f64, phi_deg: f64, p: f64, c: &SpectrumComponents, sql: f64) -> Self {
        Self {
            rho,
            phi_used: phi_deg,
            p,
            s_m: c.s_m,
            s_ii: c.s_ii,
            s_ff: c.s_ff,
            s_corr: c.s_corr,
            s_ln: c.s_ln,
            total: c.total,
            total_over_sql: c.total / sql,
        }
    }

    fn values(&self) -> Vec<f64> {
        vec![
            self.rho,
            self.phi_used,
            self.p,
            self.s_m,
            self.s_ii,
            self.s_ff,
            self.s_corr,
            self.s_ln,
            self.total,
            self.total_over_sql,
        ]
    }

    /// `total` equals the sum of the components, recomputed in output order.
    pub fn is_consistent(&self) -> bool {
        let sum = self.s_m + self.s_ii + self.s_ff + self.s_corr + self.s_ln;
        (sum - self.total).abs() <= 1e-12 * (self.total.abs() + sum.abs()).max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub metadata: TableMetadata,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn to_data(&self) -> DataTable {
        DataTable {
            metadata: self.metadata.clone(),
            rows: self.rows.iter().map(SpectrumRow::values).collect(),
        }
    }

    /// Rebuilds a spectrum table, checking every row's `total`.
    pub fn from_data(data: DataTable) -> Result<Self> {
        if data.metadata.columns.iter().map(String::as_str).ne(SPECTRUM_COLUMNS) {
            return Err(Error::Shape(format!(
                "expected columns {:?}, found {:?}",
                SPECTRUM_COLUMNS, data.metadata.columns
            )));
        }
        let mut rows = Vec::with_capacity(data.rows.len());
        for (i, r) in data.rows.iter().enumerate() {
            let row = SpectrumRow {
                rho: r[0],
                phi_used: r[1],
                p: r[2],
                s_m: r[3],
                s_ii: r[4],
                s_ff: r[5],
                s_corr: r[6],
                s_ln: r[7],
                total: r[8],
                total_over_sql: r[9],
            };
            if !row.is_consistent() {
                return Err(Error::Shape(format!(
                    "row {}: total {} differs from the sum of its components",
                    i + 1,
                    row.total
                )));
            }
            rows.push(row);
        }
        Ok(Self {
            metadata: data.metadata,
            rows,
        })
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `table` in the given format. Floats carry 17 significant digits.
pub fn emit_table<W: Write>(table: &DataTable, format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", table.metadata.columns.join(","))?;
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        Format::Jsonl => {
            let meta = serde_json::json!({ "metadata": &table.metadata });
            writeln!(out, "{meta}")?;
            for row in &table.rows {
                let fields: Vec<String> = table
                    .metadata
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        let value = if v.is_finite() { fmt_float(*v) } else { "null".into() };
                        format!("{}:{}", serde_json::Value::from(c.as_str()), value)
                    })
                    .collect();
                writeln!(out, "{{{}}}", fields.join(","))?;
            }
        }
    }
    Ok(())
}

pub fn write_table(table: &DataTable, format: Format, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    emit_table(table, format, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Reads a CSV table written by [`emit_table`]. Metadata other than the
/// column names is not stored in CSV and comes back empty.
pub fn read_csv_table(path: &Path, name: &str) -> Result<DataTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_table(&text, name).map_err(|reason| Error::Parse {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn parse_csv_table(text: &str, name: &str) -> std::result::Result<DataTable, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let mut table = DataTable::new(TableMetadata::new(name, &columns));
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, String> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2)))
            .collect();
        let row = row?;
        if row.len() != columns.len() {
            return Err(format!(
                "line {}: expected {} columns, found {}",
                i + 2,
                columns.len(),
                row.len()
            ));
        }
        table.rows.push(row);
    }
    Ok(table)
}
