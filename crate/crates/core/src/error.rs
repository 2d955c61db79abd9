use thiserror::Error;

use crate::fixed_precision::QbFactors;

pub type Dims = (usize, usize, usize);

#[derive(Debug, Error)]
pub enum TubalError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimMismatch { op: &'static str, left: Dims, right: Dims },

    #[error("tensor of dims {dims:?} needs {expected} values, got {actual}")]
    BadLength { dims: Dims, expected: usize, actual: usize },

    #[error("non-finite value at linear index {index}")]
    NonFinite { index: usize },

    #[error("spectrum is not conjugate symmetric: imaginary residue {residue:e} vs norm {norm:e}")]
    SymmetryViolation { residue: f64, norm: f64 },

    #[error("rank {rank} outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("Fourier slice {slice} is singular")]
    SingularSlice { slice: usize },

    #[error("tensor is not symmetric (deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("negative Fourier diagonal value {value:e} in slice {slice}")]
    NegativeSpectrum { slice: usize, value: f64 },

    #[error("Fourier slice {slice} is numerically singular (condition number {cond:e})")]
    SingularTensor { slice: usize, cond: f64 },

    #[error("triangular factor in Fourier slice {slice} is numerically singular (condition number {cond:e})")]
    SingularTriangular { slice: usize, cond: f64 },

    #[error("Gram tensor is ill conditioned in Fourier slice {slice} (eigenvalue ratio {ratio:e})")]
    IllConditionedGram { slice: usize, ratio: f64 },

    #[error("rank cap {max_rank} reached with residual estimate {residual:e} above tolerance")]
    RankCapExceeded {
        max_rank: usize,
        residual: f64,
        factors: Box<QbFactors>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inputs are identical, PSNR is infinite")]
    IdenticalInputs,

    #[error("reference tensor has zero norm")]
    ZeroReference,

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TubalError> = std::result::Result<T, E>;

pub(crate) fn check_dims(op: &'static str, left: Dims, right: Dims, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(TubalError::DimMismatch { op, left, right })
    }
}
