//! Low tubal rank approximation of third-order tensors under the T-product.
//!
//! Tensors are real and stored mode-1 fastest. Products, factorizations and
//! sketches are computed slice by slice in the Fourier domain along the
//! third mode, keeping only the non-redundant half of the spectrum.

pub mod completion;
pub mod counted;
pub mod error;
pub mod fixed_precision;
pub mod fourier;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod single_pass;
pub mod tensor;

#[cfg(test)]
mod testutil;

pub use error::{Result, TubalError};
pub use fourier::{fft_mode3, ifft_mode3, t_product, FourierTensor};
pub use tensor::{Mode, Tensor3};
