//! Synthetic data, image codecs, experiment grids and CSV reporting for the
//! `tubal` command-line tool.

pub mod experiments;
pub mod netpbm;
pub mod record;
pub mod runner;
pub mod synth;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Tubal(#[from] tubal::TubalError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Format(String),

    #[error("{0}")]
    Usage(String),
}
