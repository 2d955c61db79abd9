//! Sketch accumulation over a stream of additive updates `X = Σ H_n`.
//!
//! Both sketches are linear in the data, so each update can be folded in and
//! then dropped. States built over disjoint shards can be merged by adding
//! their accumulators.

use crate::error::{check_dims, Dims, Result};
use crate::fourier::{fft_mode3, FourierTensor};
use crate::linalg::TsvdFactors;
use crate::tensor::Tensor3;

use super::{draw_tests, finalize, SinglePassAlg, SketchParams};

#[derive(Clone, Debug)]
pub struct SketchState {
    dims: Dims,
    params: SketchParams,
    which: SinglePassAlg,
    omega1: FourierTensor,
    omega2: FourierTensor,
    yc: FourierTensor,
    yr: FourierTensor,
    updates: usize,
}

impl SketchState {
    /// Draws the test tensors exactly as the batch algorithm would for the
    /// same parameters, so streamed and batch results coincide.
    pub fn new(dims: Dims, params: SketchParams, which: SinglePassAlg) -> Result<Self> {
        params.validate(dims)?;
        let (omega1, omega2) = draw_tests(dims, &params, which);
        let yc = FourierTensor::zeros((dims.0, omega1.cols(), dims.2));
        let yr = FourierTensor::zeros((dims.1, omega2.cols(), dims.2));
        Ok(Self {
            dims,
            params,
            which,
            omega1,
            omega2,
            yc,
            yr,
            updates: 0,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    /// Range sketch `X * Ω1` accumulated so far.
    pub fn range_sketch(&self) -> Result<Tensor3> {
        self.yc.to_spatial()
    }

    /// Co-range sketch `Xᵀ * Ω2` accumulated so far.
    pub fn corange_sketch(&self) -> Result<Tensor3> {
        self.yr.to_spatial()
    }

    /// Folds one additive update into both sketches.
    pub fn ingest(&mut self, update: &Tensor3) -> Result<()> {
        check_dims("sketch ingest", self.dims, update.dims(), self.dims == update.dims())?;
        let h = fft_mode3(update);
        self.yc = self.yc.add(&h.mul(&self.omega1)?)?;
        self.yr = self.yr.add(&h.adjoint_mul(&self.omega2)?)?;
        self.updates += 1;
        Ok(())
    }

    /// Combines a state built on another shard of the same stream.
    pub fn merge(&mut self, other: &SketchState) -> Result<()> {
        check_dims("sketch merge", self.dims, other.dims, self.dims == other.dims)?;
        if self.params != other.params || self.which != other.which {
            return Err(crate::error::TubalError::InvalidParameter(
                "cannot merge sketches drawn with different parameters".into(),
            ));
        }
        self.yc = self.yc.add(&other.yc)?;
        self.yr = self.yr.add(&other.yr)?;
        self.updates += other.updates;
        Ok(())
    }

    pub fn finalize(&self) -> Result<TsvdFactors> {
        finalize(&self.params, self.which, &self.omega1, &self.omega2, &self.yc, &self.yr)
    }
}

pub fn sketch_ingest(mut state: SketchState, update: &Tensor3) -> Result<SketchState> {
    state.ingest(update)?;
    Ok(state)
}

pub fn sketch_finalize(state: &SketchState) -> Result<TsvdFactors> {
    state.finalize()
}
