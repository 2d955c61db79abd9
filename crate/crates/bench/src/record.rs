//! One CSV row per algorithm run.

use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::BenchError;

pub const HEADER: &str = "algorithm,n,L,K,H,rank,eps,block,passes,seed,time_s,rel_err,est_rank,pass_count";

/// Parameters that do not apply to an algorithm are left empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    /// First dimension of the input (all three for the cubic generators).
    pub n: usize,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "H")]
    pub h: Option<usize>,
    /// Requested tubal rank.
    pub rank: Option<usize>,
    pub eps: Option<f64>,
    pub block: Option<usize>,
    /// Power iterations or pass budget, as configured.
    pub passes: Option<usize>,
    pub seed: u64,
    pub time_s: f64,
    pub rel_err: f64,
    pub est_rank: usize,
    /// Sweeps over the data actually performed.
    pub pass_count: Option<usize>,
}

impl RunRecord {
    pub fn new(algorithm: impl Into<String>, n: usize, seed: u64) -> Self {
        Self {
            algorithm: algorithm.into(),
            n,
            l: None,
            k: None,
            h: None,
            rank: None,
            eps: None,
            block: None,
            passes: None,
            seed,
            time_s: 0.0,
            rel_err: 0.0,
            est_rank: 0,
            pass_count: None,
        }
    }

    fn check(&self) -> Result<(), BenchError> {
        let finite = self.time_s.is_finite() && self.rel_err.is_finite() && self.eps.is_none_or(f64::is_finite);
        if finite {
            Ok(())
        } else {
            Err(BenchError::Format(format!(
                "non-finite value in record for {}",
                self.algorithm
            )))
        }
    }
}

pub fn write_records(w: impl Write, records: &[RunRecord], header: bool) -> Result<(), BenchError> {
    let mut out = csv::WriterBuilder::new().has_headers(header).from_writer(w);
    for r in records {
        r.check()?;
        out.serialize(r)?;
    }
    if header && records.is_empty() {
        out.write_record(HEADER.split(','))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records(r: impl Read) -> Result<Vec<RunRecord>, BenchError> {
    let mut input = csv::Reader::from_reader(r);
    let header: Vec<String> = input.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != HEADER {
        return Err(BenchError::Format(format!(
            "unexpected CSV header '{}'",
            header.join(",")
        )));
    }
    input.deserialize().map(|row| row.map_err(BenchError::from)).collect()
}

/// Appends rows, writing the header first when the file is new or empty.
pub fn append_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<(), BenchError> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    write_records(file, records, fresh)
}
