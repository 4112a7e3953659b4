//! CSV/JSON writers and the matching readers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qsera::preset::{monomial_label, CoefficientReport};
use qsera::{PolyJson, RunReport};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub bitstring: String,
    pub probability: f64,
}

/// `series` is `simulation`, `recursion` or `deviation` (absolute
/// difference of the two, column by column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoCsvRow {
    pub series: String,
    pub k: usize,
    pub a_other: f64,
    pub a_target: f64,
    pub p_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCsvRow {
    pub selection_bits: String,
    pub n_assets: usize,
    pub mu_p: Option<f64>,
    pub sigma_p: Option<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub term: String,
    pub f_x1e3: f64,
    pub f_x1e3_table: f64,
    pub g_x10: f64,
    pub g_x10_table: f64,
    pub g_n: f64,
    pub g_n_table: f64,
    pub within_rounding: [bool; 3],
}

/// Output of `expand`: the three coefficient sets, plus the side-by-side
/// with the published table for the built-in preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandReport {
    pub mode: String,
    pub f_min: f64,
    pub f_max: f64,
    pub n: u32,
    pub f: PolyJson,
    pub g: PolyJson,
    pub g_n: PolyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<Vec<ComparisonRow>>,
}

pub fn comparison_rows(report: &CoefficientReport) -> Vec<ComparisonRow> {
    report
        .rows
        .iter()
        .map(|r| ComparisonRow {
            term: monomial_label(r.mask),
            f_x1e3: r.f_scaled,
            f_x1e3_table: r.f_published,
            g_x10: r.g_scaled,
            g_x10_table: r.g_published,
            g_n: r.u_scaled,
            g_n_table: r.u_published,
            within_rounding: [r.f_agrees(), r.g_agrees(), r.u_agrees()],
        })
        .collect()
}

pub fn write_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv<T: DeserializeOwned>(text: &str) -> CliResult<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Input(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn read_run_report(text: &str) -> CliResult<RunReport> {
    serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))
}

pub fn read_expand_report(text: &str) -> CliResult<ExpandReport> {
    serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
