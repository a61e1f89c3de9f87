use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::monte_carlo::RunReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Text,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "text" | "txt" => Ok(TableFormat::Text),
            _ => Err(Error::InvalidInput(format!("unknown table format '{s}'"))),
        }
    }
}

pub const TABLE_COLUMNS: [&str; 9] = [
    "m",
    "n",
    "k",
    "noise",
    "fr",
    "algorithm",
    "median_iter",
    "median_err",
    "median_time_s",
];

/// One row per report, columns as in [`TABLE_COLUMNS`].
pub fn emit_table(reports: &[RunReport], format: TableFormat) -> Result<String> {
    let rows: Vec<[String; 9]> = reports
        .iter()
        .map(|r| {
            [
                r.problem.m.to_string(),
                r.problem.n.to_string(),
                r.problem.k_true.to_string(),
                r.problem.noise_energy.to_string(),
                r.fr.to_string(),
                r.algorithm().to_string(),
                r.median_iterations.to_string(),
                r.median_error.to_string(),
                r.median_time_s.to_string(),
            ]
        })
        .collect();
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(TABLE_COLUMNS)?;
            for row in &rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        TableFormat::Text => {
            let pretty: Vec<[String; 9]> = reports
                .iter()
                .zip(&rows)
                .map(|(r, raw)| {
                    let mut p = raw.clone();
                    p[3] = format!("{:.1e}", r.problem.noise_energy);
                    p[4] = format!("{:.3}", r.fr);
                    p[6] = format!("{}", r.median_iterations);
                    p[7] = format!("{:.2e}", r.median_error);
                    p[8] = format!("{:.3}", r.median_time_s);
                    p
                })
                .collect();
            let mut width: Vec<usize> = TABLE_COLUMNS.iter().map(|c| c.len()).collect();
            for row in &pretty {
                for (w, cell) in width.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let line = |out: &mut String, cells: &[&str]| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&width)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                let _ = writeln!(out, "{}", parts.join("  "));
            };
            line(&mut out, &TABLE_COLUMNS);
            for row in &pretty {
                let cells: Vec<&str> = row.iter().map(String::as_str).collect();
                line(&mut out, &cells);
            }
            Ok(out)
        }
    }
}
