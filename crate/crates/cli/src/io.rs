//! CSV interchange. Floats are written with Rust's shortest round-trip
//! formatting, so every value parses back to the same `f64`.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use censored_llr::prelude::*;

use crate::error::{CliError, Result};

pub const DATASET_HEADER: [&str; 3] = ["x", "y", "delta"];
pub const FIT_HEADER: [&str; 3] = ["x", "estimate", "degenerate"];
pub const SIMULATED_HEADER: [&str; 4] = ["x", "y", "delta", "z_latent"];

pub fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin()));
    }
    Ok(Box::new(
        File::open(path).map_err(|e| CliError::io(path, e))?,
    ))
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(io::stdout())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout())),
        Some(p) => Ok(Box::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
    }
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| CliError::Data(format!("line 1: {e}")))?;
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(CliError::Data(format!(
            "line 1: expected header `{}`, found `{}`",
            expected.join(","),
            found.join(",")
        )));
    }
    Ok(())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_f64(record: &csv::StringRecord, column: usize, name: &str) -> Result<f64> {
    let raw = record.get(column).unwrap_or("").trim();
    let value: f64 = raw.parse().map_err(|_| {
        CliError::Data(format!(
            "line {}: {name} is not a number: `{raw}`",
            line_of(record)
        ))
    })?;
    if !value.is_finite() {
        return Err(CliError::Data(format!(
            "line {}: {name} is not finite",
            line_of(record)
        )));
    }
    Ok(value)
}

fn parse_flag(record: &csv::StringRecord, column: usize, name: &str) -> Result<bool> {
    match record.get(column).unwrap_or("").trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(CliError::Data(format!(
            "line {}: {name} must be 0 or 1, got `{other}`",
            line_of(record)
        ))),
    }
}

fn records(
    reader: &mut csv::Reader<impl Read>,
) -> impl Iterator<Item = Result<csv::StringRecord>> + '_ {
    reader.records().map(|r| {
        r.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Data(format!("line {line}: {e}"))
        })
    })
}

/// Reads `x,y,delta` rows.
pub fn read_dataset(input: impl Read) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    check_header(&mut reader, &DATASET_HEADER)?;
    let mut rows = Vec::new();
    for record in records(&mut reader) {
        let record = record?;
        rows.push(ObservedRecord::new(
            parse_f64(&record, 0, "x")?,
            parse_f64(&record, 1, "y")?,
            parse_flag(&record, 2, "delta")?,
        ));
    }
    Ok(Dataset::new(rows)?)
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn flush(mut writer: csv::Writer<impl Write>) -> Result<()> {
    writer.flush().map_err(|e| CliError::io("<output>", e))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::io("<output>", e.into())
}

pub fn write_fit(output: impl Write, fit: &FitResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(FIT_HEADER).map_err(csv_error)?;
    for ((x, e), d) in fit
        .eval_points
        .iter()
        .zip(&fit.estimates)
        .zip(&fit.degenerate)
    {
        w.write_record([x.to_string(), e.to_string(), flag(*d).to_string()])
            .map_err(csv_error)?;
    }
    flush(w)
}

/// One row of a fit file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub x: f64,
    pub estimate: f64,
    pub degenerate: bool,
}

pub fn read_fit(input: impl Read) -> Result<Vec<FitRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    check_header(&mut reader, &FIT_HEADER)?;
    records(&mut reader)
        .map(|record| {
            let record = record?;
            Ok(FitRow {
                x: parse_f64(&record, 0, "x")?,
                estimate: parse_f64(&record, 1, "estimate")?,
                degenerate: parse_flag(&record, 2, "degenerate")?,
            })
        })
        .collect()
}

/// Writes a simulated sample. `z_latent` is the unobservable response, kept
/// for evaluation only.
pub fn write_simulated(output: impl Write, sim: &Simulated) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(SIMULATED_HEADER).map_err(csv_error)?;
    for (r, z) in sim.data.records().iter().zip(&sim.latent) {
        w.write_record([
            r.x.to_string(),
            r.y.to_string(),
            flag(r.delta).to_string(),
            z.to_string(),
        ])
        .map_err(csv_error)?;
    }
    flush(w)
}

pub const REPORT_HEADER: [&str; 8] = [
    "censoring_target",
    "n",
    "estimator",
    "mean_mse",
    "sd_mse",
    "mean_selected_h",
    "mean_observed_cp",
    "degenerate_rate",
];

pub fn write_report(output: impl Write, report: &MseReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(REPORT_HEADER).map_err(csv_error)?;
    for r in &report.rows {
        w.write_record([
            r.target_cp.to_string(),
            r.n.to_string(),
            r.estimator.name().to_string(),
            r.mean_mse.to_string(),
            r.sd_mse.to_string(),
            r.mean_bandwidth.to_string(),
            r.mean_observed_cp.to_string(),
            r.degenerate_rate.to_string(),
        ])
        .map_err(csv_error)?;
    }
    flush(w)
}

pub const REPLICATION_HEADER: [&str; 13] = [
    "censoring_target",
    "n",
    "replication",
    "seed",
    "censor_location",
    "observed_cp",
    "estimator",
    "selected_h",
    "mse",
    "sup_error",
    "edge_abs_error",
    "degenerate_points",
    "synthetic_degenerate",
];

pub fn write_replications(output: impl Write, records: &[ReplicationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(REPLICATION_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.target_cp.to_string(),
            r.n.to_string(),
            r.replication.to_string(),
            r.seed.to_string(),
            r.censor_location.to_string(),
            r.observed_cp.to_string(),
            r.estimator.name().to_string(),
            r.bandwidth.to_string(),
            r.mse.to_string(),
            r.sup_error.to_string(),
            r.edge_abs_error.to_string(),
            r.degenerate_points.to_string(),
            r.synthetic_degenerate.to_string(),
        ])
        .map_err(csv_error)?;
    }
    flush(w)
}
