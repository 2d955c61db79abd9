//! Shared fixtures for unit tests.

use crate::fourier::t_product;
use crate::random::{gauss_tensor, GaussKind};
use crate::tensor::Tensor3;

pub fn gauss(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
    gauss_tensor(n1, n2, n3, GaussKind::Full, seed)
}

/// Product of two Gaussian factors: tubal rank `r` almost surely.
pub fn lowrank(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> Tensor3 {
    t_product(&gauss(n1, r, n3, seed), &gauss(r, n2, n3, seed ^ 0x9e37_79b9)).unwrap()
}

pub fn rel(approx: &Tensor3, exact: &Tensor3) -> f64 {
    approx.sub(exact).unwrap().fro_norm() / exact.fro_norm()
}

pub fn prod(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    t_product(a, b).unwrap()
}

/// Largest entry of `Qᵀ * Q − I`, relative to one.
pub fn orth_defect(q: &Tensor3) -> f64 {
    let g = prod(&q.transpose(), q);
    g.sub(&Tensor3::identity(q.cols(), q.depth())).unwrap().max_abs()
}
