//! Tabular output of observable reports (CSV and JSON).
//!
//! CSV floats are written in shortest round-trip form, so parsing a row back
//! reproduces the report exactly. A grid point that failed carries its
//! parameters, empty observable columns and `source = error`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{ObservableReport, Source};
use crate::reservoir::{DipoleMode, EnsembleConfig};

pub const CSV_HEADER: [&str; 19] = [
    "eta1", "eta2", "n_atoms", "theta_deg", "mode", "s11", "s22", "s33", "sz", "sz2", "g1_1",
    "g1_2", "g1_total", "g2_11", "g2_22", "g2_12", "g2_21", "g2_total", "source",
];

/// A grid point whose evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedPoint {
    pub eta1: f64,
    pub eta2: f64,
    pub n_atoms: usize,
    pub theta_deg: f64,
    pub mode: DipoleMode,
    pub error: String,
}

impl FailedPoint {
    pub fn new(config: &EnsembleConfig, error: &Error) -> Self {
        Self {
            eta1: config.bath1.eta(),
            eta2: config.bath2.eta(),
            n_atoms: config.n_atoms,
            theta_deg: config.theta_deg(),
            mode: config.mode,
            error: error.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Row {
    Report(ObservableReport),
    Failed(FailedPoint),
}

impl Row {
    pub fn from_result(config: &EnsembleConfig, result: Result<ObservableReport>) -> Self {
        match result {
            Ok(r) => Row::Report(r),
            Err(e) => Row::Failed(FailedPoint::new(config, &e)),
        }
    }

    pub fn report(&self) -> Option<&ObservableReport> {
        match self {
            Row::Report(r) => Some(r),
            Row::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRecord {
    eta1: f64,
    eta2: f64,
    n_atoms: usize,
    theta_deg: f64,
    mode: DipoleMode,
    s11: Option<f64>,
    s22: Option<f64>,
    s33: Option<f64>,
    sz: Option<f64>,
    sz2: Option<f64>,
    g1_1: Option<f64>,
    g1_2: Option<f64>,
    g1_total: Option<f64>,
    g2_11: Option<f64>,
    g2_22: Option<f64>,
    g2_12: Option<f64>,
    g2_21: Option<f64>,
    g2_total: Option<f64>,
    source: String,
}

impl From<&Row> for CsvRecord {
    fn from(row: &Row) -> Self {
        match row {
            Row::Report(r) => CsvRecord {
                eta1: r.eta1,
                eta2: r.eta2,
                n_atoms: r.n_atoms,
                theta_deg: r.theta_deg,
                mode: r.mode,
                s11: Some(r.s11),
                s22: Some(r.s22),
                s33: Some(r.s33),
                sz: Some(r.sz),
                sz2: r.sz2,
                g1_1: r.g1_1,
                g1_2: r.g1_2,
                g1_total: r.g1_total,
                g2_11: r.g2_11,
                g2_22: r.g2_22,
                g2_12: r.g2_12,
                g2_21: r.g2_21,
                g2_total: r.g2_total,
                source: r.source.as_str().to_string(),
            },
            Row::Failed(f) => CsvRecord {
                eta1: f.eta1,
                eta2: f.eta2,
                n_atoms: f.n_atoms,
                theta_deg: f.theta_deg,
                mode: f.mode,
                s11: None,
                s22: None,
                s33: None,
                sz: None,
                sz2: None,
                g1_1: None,
                g1_2: None,
                g1_total: None,
                g2_11: None,
                g2_22: None,
                g2_12: None,
                g2_21: None,
                g2_total: None,
                source: "error".into(),
            },
        }
    }
}

impl TryFrom<CsvRecord> for Row {
    type Error = Error;

    fn try_from(c: CsvRecord) -> Result<Self> {
        if c.source == "error" {
            return Ok(Row::Failed(FailedPoint {
                eta1: c.eta1,
                eta2: c.eta2,
                n_atoms: c.n_atoms,
                theta_deg: c.theta_deg,
                mode: c.mode,
                error: String::new(),
            }));
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("column {name} is empty in a non-error row")))
        };
        Ok(Row::Report(ObservableReport {
            eta1: c.eta1,
            eta2: c.eta2,
            n_atoms: c.n_atoms,
            theta_deg: c.theta_deg,
            mode: c.mode,
            s11: need(c.s11, "s11")?,
            s22: need(c.s22, "s22")?,
            s33: need(c.s33, "s33")?,
            sz: need(c.sz, "sz")?,
            sz2: c.sz2,
            g1_1: c.g1_1,
            g1_2: c.g1_2,
            g1_total: c.g1_total,
            g2_11: c.g2_11,
            g2_22: c.g2_22,
            g2_12: c.g2_12,
            g2_21: c.g2_21,
            g2_total: c.g2_total,
            source: c.source.parse::<Source>()?,
        }))
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(CsvRecord::from(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize::<CsvRecord>()
        .map(|rec| Row::try_from(rec?))
        .collect()
}

pub fn write_json<W: Write>(rows: &[Row], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<Row>> {
    Ok(serde_json::from_reader(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::basis_sum_report;

    fn sample() -> Vec<Row> {
        let good = EnsembleConfig::orthogonal_eta(3, 0.37).unwrap();
        let bad = EnsembleConfig::orthogonal_eta(3, 0.0).unwrap();
        let weak = basis_sum_report(&bad).unwrap();
        let failed = Error::ClosedFormUnavailable("test".into());
        vec![
            Row::Report(basis_sum_report(&good).unwrap()),
            Row::Report(weak),
            Row::Failed(FailedPoint::new(&bad, &failed)),
        ]
    }

    #[test]
    fn header_is_first_line() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let last = text.lines().last().unwrap();
        assert!(last.ends_with(",,,,,,,,,,,,,error"), "{last}");
    }

    #[test]
    fn csv_round_trip() {
        let rows = sample();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back[..2], rows[..2]);
        match &back[2] {
            Row::Failed(f) => assert_eq!(f.n_atoms, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let rows = sample();
        let mut buf = Vec::new();
        write_json(&rows, &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
