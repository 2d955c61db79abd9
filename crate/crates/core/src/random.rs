//! Seeded Gaussian test tensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::Tensor3;

/// Which entries of a random tensor are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GaussKind {
    /// i.i.d. standard normal in every entry.
    #[default]
    Full,
    /// Gaussian first frontal slice, zeros elsewhere.
    FirstSlice,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a tensor from an existing generator, so that several test tensors
/// can share one seeded stream.
pub fn gauss_from_rng(rng: &mut impl Rng, (n1, n2, n3): (usize, usize, usize), kind: GaussKind) -> Tensor3 {
    let per_slice = n1 * n2;
    let drawn = match kind {
        GaussKind::Full => per_slice * n3,
        GaussKind::FirstSlice => per_slice.min(per_slice * n3),
    };
    let mut values: Vec<f64> = (0..drawn).map(|_| rng.sample(StandardNormal)).collect();
    values.resize(per_slice * n3, 0.0);
    Tensor3::from_raw((n1, n2, n3), values)
}

pub fn gauss_tensor(n1: usize, n2: usize, n3: usize, kind: GaussKind, seed: u64) -> Tensor3 {
    gauss_from_rng(&mut rng_from_seed(seed), (n1, n2, n3), kind)
}
