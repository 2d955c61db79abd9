//! Pass-counting access to a data tensor.
//!
//! Randomized algorithms see the data only through [`CountedTensor`]. Every
//! method that touches the data is one sweep over it and bumps the counter,
//! which makes "reads the input once" an assertable property.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use crate::error::{check_dims, Result};
use crate::fourier::{fft_mode3, FourierTensor};
use crate::tensor::Tensor3;

pub struct CountedTensor<'a> {
    data: &'a Tensor3,
    spectrum: OnceLock<FourierTensor>,
    energy: OnceLock<f64>,
    passes: AtomicUsize,
}

pub fn counted_source(x: &Tensor3) -> CountedTensor<'_> {
    CountedTensor::new(x)
}

impl<'a> CountedTensor<'a> {
    pub fn new(data: &'a Tensor3) -> Self {
        Self {
            data,
            spectrum: OnceLock::new(),
            energy: OnceLock::new(),
            passes: AtomicUsize::new(0),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.data.dims()
    }

    /// Number of sweeps over the data so far.
    pub fn passes(&self) -> usize {
        self.passes.load(Ordering::SeqCst)
    }

    fn sweep(&self) -> &FourierTensor {
        self.passes.fetch_add(1, Ordering::SeqCst);
        self.energy.get_or_init(|| self.data.fro_norm_sq());
        self.spectrum.get_or_init(|| fft_mode3(self.data))
    }

    /// `‖X‖²_F`. It is accumulated during the first sweep, so it is free once
    /// any product has been formed; asking for it first costs one pass.
    pub fn energy(&self) -> f64 {
        if let Some(e) = self.energy.get() {
            return *e;
        }
        self.passes.fetch_add(1, Ordering::SeqCst);
        *self.energy.get_or_init(|| self.data.fro_norm_sq())
    }

    /// `X * Ω` with `Ω` given in the Fourier domain.
    pub fn apply(&self, omega: &FourierTensor) -> Result<FourierTensor> {
        check_dims("X*Ω", self.dims(), omega.dims(), self.fits_right(omega))?;
        self.sweep().mul(omega)
    }

    /// `Xᵀ * Ω`.
    pub fn apply_transpose(&self, omega: &FourierTensor) -> Result<FourierTensor> {
        check_dims("Xᵀ*Ω", self.dims(), omega.dims(), self.fits_left(omega))?;
        self.sweep().adjoint_mul(omega)
    }

    /// `X * Ω1` and `Xᵀ * Ω2` from a single sweep.
    pub fn apply_both(&self, omega1: &FourierTensor, omega2: &FourierTensor) -> Result<(FourierTensor, FourierTensor)> {
        check_dims("X*Ω1", self.dims(), omega1.dims(), self.fits_right(omega1))?;
        check_dims("Xᵀ*Ω2", self.dims(), omega2.dims(), self.fits_left(omega2))?;
        let x = self.sweep();
        Ok((x.mul(omega1)?, x.adjoint_mul(omega2)?))
    }

    /// Copies of the lateral slices `cols` and horizontal slices `rows`,
    /// gathered in one sweep.
    pub fn sample_slices(&self, rows: &[usize], cols: &[usize]) -> Result<(Tensor3, Tensor3)> {
        self.passes.fetch_add(1, Ordering::SeqCst);
        self.energy.get_or_init(|| self.data.fro_norm_sq());
        Ok((self.data.lateral_slices(cols)?, self.data.horizontal_slices(rows)?))
    }

    /// Spatial-domain `X * Ω`.
    pub fn t_product(&self, omega: &Tensor3) -> Result<Tensor3> {
        self.apply(&fft_mode3(omega))?.to_spatial()
    }

    /// Spatial-domain `Xᵀ * Ω`.
    pub fn transpose_product(&self, omega: &Tensor3) -> Result<Tensor3> {
        self.apply_transpose(&fft_mode3(omega))?.to_spatial()
    }

    fn fits_right(&self, omega: &FourierTensor) -> bool {
        let (_, n2, n3) = self.dims();
        omega.rows() == n2 && omega.depth() == n3
    }

    fn fits_left(&self, omega: &FourierTensor) -> bool {
        let (n1, _, n3) = self.dims();
        omega.rows() == n1 && omega.depth() == n3
    }
}
