//! Result rows and their CSV / JSON forms.
//!
//! Floats are written with 17 significant digits so a CSV file reads back
//! to the identical `f64` values. Missing values are empty cells.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use fas_core::Method;
use serde::{Deserialize, Serialize};

pub const COLUMNS: [&str; 16] = [
    "sweep_var",
    "sweep_value",
    "M",
    "K",
    "W",
    "R",
    "phi_db",
    "method",
    "value",
    "ci_low",
    "ci_high",
    "diag_tail",
    "diag_nodes",
    "samples",
    "status",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_var: String,
    pub sweep_value: f64,
    #[serde(rename = "M")]
    pub ports: usize,
    #[serde(rename = "K")]
    pub active: usize,
    #[serde(rename = "W")]
    pub aperture: f64,
    #[serde(rename = "R")]
    pub rate: f64,
    pub phi_db: f64,
    pub method: Method,
    pub value: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Truncation tail bound of the exact series (gc only).
    pub diag_tail: Option<f64>,
    /// Quadrature node count (gc only).
    pub diag_nodes: Option<u64>,
    /// Monte-Carlo sample count (mc only).
    pub samples: Option<u64>,
    /// `ok`, or the error code of the failure.
    pub status: String,
    pub wall_ms: Option<f64>,
    /// Full method diagnostics; JSON only.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
    /// Error message when `status` is not `ok`; JSON only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn opt_int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], header: Option<&str>, out: W) -> Result<()> {
    let mut out = out;
    if let Some(h) = header {
        writeln!(out, "# {h}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.sweep_var.clone(),
            float(r.sweep_value),
            r.ports.to_string(),
            r.active.to_string(),
            float(r.aperture),
            float(r.rate),
            float(r.phi_db),
            r.method.to_string(),
            opt_float(r.value),
            opt_float(r.ci_low),
            opt_float(r.ci_high),
            opt_float(r.diag_tail),
            opt_int(r.diag_nodes),
            opt_int(r.samples),
            r.status.clone(),
            opt_float(r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_opt<T: std::str::FromStr>(s: &str, col: &str) -> Result<Option<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    if s.is_empty() {
        Ok(None)
    } else {
        Ok(Some(s.parse().with_context(|| format!("bad value '{s}' in column {col}"))?))
    }
}

fn parse_req<T: std::str::FromStr>(s: &str, col: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    parse_opt(s, col)?.with_context(|| format!("column {col} is empty"))
}

/// Read a table written by [`write_csv`]; `#` header lines are skipped.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if headers != COLUMNS {
        bail!("unexpected columns {headers:?}");
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(ResultRow {
            sweep_var: f(0).to_owned(),
            sweep_value: parse_req(f(1), COLUMNS[1])?,
            ports: parse_req(f(2), COLUMNS[2])?,
            active: parse_req(f(3), COLUMNS[3])?,
            aperture: parse_req(f(4), COLUMNS[4])?,
            rate: parse_req(f(5), COLUMNS[5])?,
            phi_db: parse_req(f(6), COLUMNS[6])?,
            method: f(7).parse().map_err(|e| anyhow::anyhow!("{e}"))?,
            value: parse_opt(f(8), COLUMNS[8])?,
            ci_low: parse_opt(f(9), COLUMNS[9])?,
            ci_high: parse_opt(f(10), COLUMNS[10])?,
            diag_tail: parse_opt(f(11), COLUMNS[11])?,
            diag_nodes: parse_opt(f(12), COLUMNS[12])?,
            samples: parse_opt(f(13), COLUMNS[13])?,
            status: f(14).to_owned(),
            wall_ms: parse_opt(f(15), COLUMNS[15])?,
            diagnostics: BTreeMap::new(),
            error: None,
        });
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    header: Option<String>,
    rows: Vec<ResultRow>,
}

pub fn write_json<W: Write>(rows: &[ResultRow], header: Option<&str>, mut out: W) -> Result<()> {
    let table = JsonTable {
        header: header.map(str::to_owned),
        rows: rows.to_vec(),
    };
    serde_json::to_writer_pretty(&mut out, &table)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let table: JsonTable = serde_json::from_reader(input)?;
    Ok(table.rows)
}
