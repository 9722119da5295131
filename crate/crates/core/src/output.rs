//! Stable on-disk formats for sweep results.
//!
//! CSV: a `# format_version: 1` comment line, then the header
//! `theta_ab_rad,n_pp,n_pm,n_mp,n_mm,e_hat,std_err` and one row per angle.
//!
//! JSON: `{"format_version": 1, "config": {...}, "seed": ..., "rows": [...],
//! "fit": {...}}` where each row carries the same fields as the CSV.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::experiment::{CountsTable, SweepRow, VisibilityFit};

pub const FORMAT_VERSION: u32 = 1;
pub const CSV_VERSION_LINE: &str = "# format_version: 1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta_ab_rad: f64,
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
    pub e_hat: f64,
    pub std_err: f64,
}

impl From<&SweepRow> for SweepRecord {
    fn from(r: &SweepRow) -> Self {
        SweepRecord {
            theta_ab_rad: r.theta_ab_rad,
            n_pp: r.counts.n_pp,
            n_pm: r.counts.n_pm,
            n_mp: r.counts.n_mp,
            n_mm: r.counts.n_mm,
            e_hat: r.e_hat,
            std_err: r.std_err,
        }
    }
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        SweepRow {
            theta_ab_rad: r.theta_ab_rad,
            counts: CountsTable::new(r.n_pp, r.n_pm, r.n_mp, r.n_mm),
            e_hat: r.e_hat,
            std_err: r.std_err,
        }
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<(), FormatError> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(SweepRecord::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    reader
        .deserialize::<SweepRecord>()
        .map(|r| Ok(SweepRow::from(&r?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub format_version: u32,
    pub config: serde_json::Value,
    pub seed: u64,
    pub rows: Vec<SweepRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<VisibilityFit>,
}

impl SweepDocument {
    pub fn new(
        config: serde_json::Value,
        seed: u64,
        rows: &[SweepRow],
        fit: Option<VisibilityFit>,
    ) -> Self {
        SweepDocument {
            format_version: FORMAT_VERSION,
            config,
            seed,
            rows: rows.iter().map(SweepRecord::from).collect(),
            fit,
        }
    }

    pub fn sweep_rows(&self) -> Vec<SweepRow> {
        self.rows.iter().map(SweepRow::from).collect()
    }
}

pub fn write_json<W: Write>(doc: &SweepDocument, mut out: W) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<SweepDocument, FormatError> {
    let doc: SweepDocument = serde_json::from_reader(input)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(doc.format_version));
    }
    Ok(doc)
}
