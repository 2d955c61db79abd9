//! Dense real third-order tensors.
//!
//! Values are stored with the mode-1 index varying fastest, then mode-2, then
//! mode-3, so every frontal slice `X(:,:,k)` is a contiguous column-major
//! `I1 x I2` block.

use std::fmt;

use crate::error::{check_dims, Dims, Result, TubalError};

#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    values: Vec<f64>,
}

/// Concatenation axis: `First` stacks horizontal slices (more rows), `Second`
/// stacks lateral slices (more columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

impl Tensor3 {
    pub fn from_vec(dims: Dims, values: Vec<f64>) -> Result<Self> {
        let expected = dims.0 * dims.1 * dims.2;
        if values.len() != expected {
            return Err(TubalError::BadLength {
                dims,
                expected,
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(TubalError::NonFinite { index });
        }
        Ok(Self { dims, values })
    }

    /// Builds a tensor without the finiteness scan. Callers guarantee finite
    /// values of the right length.
    pub(crate) fn from_raw(dims: Dims, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), dims.0 * dims.1 * dims.2);
        Self { dims, values }
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::from_raw(dims, vec![0.0; dims.0 * dims.1 * dims.2])
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(dims.0 * dims.1 * dims.2);
        for k in 0..dims.2 {
            for j in 0..dims.1 {
                for i in 0..dims.0 {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::from_raw(dims, values)
    }

    /// The T-product identity: first frontal slice is `I_n`, the rest zero.
    pub fn identity(n: usize, depth: usize) -> Self {
        let mut t = Self::zeros((n, n, depth));
        for i in 0..n {
            t.values[i + n * i] = 1.0;
        }
        t
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn rows(&self) -> usize {
        self.dims.0
    }

    pub fn cols(&self) -> usize {
        self.dims.1
    }

    pub fn depth(&self) -> usize {
        self.dims.2
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.offset(i, j, k)]
    }

    pub fn frontal_slice(&self, k: usize) -> &[f64] {
        let n = self.dims.0 * self.dims.1;
        &self.values[k * n..(k + 1) * n]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.dims, self.values.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dims(op, self.dims, other.dims, self.dims == other.dims)?;
        Ok(Self::from_raw(
            self.dims,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Element-wise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        check_dims("add_assign", self.dims, other.dims, self.dims == other.dims)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    pub fn fro_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Tensor transpose: every frontal slice is transposed and slices
    /// `2..I3` are reversed.
    pub fn transpose(&self) -> Self {
        let (n1, n2, n3) = self.dims;
        Self::from_fn((n2, n1, n3), |i, j, k| {
            let src = if k == 0 { 0 } else { n3 - k };
            self.get(j, i, src)
        })
    }

    /// Stacks `a` and `b` along `mode`. An operand with no entries is treated
    /// as the empty tensor and the other operand is returned unchanged.
    pub fn concat(a: &Self, b: &Self, mode: Mode) -> Result<Self> {
        if a.is_empty() && !b.is_empty() {
            return Ok(b.clone());
        }
        if b.is_empty() && !a.is_empty() {
            return Ok(a.clone());
        }
        let (a1, a2, a3) = a.dims;
        let (b1, b2, b3) = b.dims;
        match mode {
            Mode::First => {
                check_dims("concat(mode 1)", a.dims, b.dims, a2 == b2 && a3 == b3)?;
                Ok(Self::from_fn((a1 + b1, a2, a3), |i, j, k| {
                    if i < a1 {
                        a.get(i, j, k)
                    } else {
                        b.get(i - a1, j, k)
                    }
                }))
            }
            Mode::Second => {
                check_dims("concat(mode 2)", a.dims, b.dims, a1 == b1 && a3 == b3)?;
                Ok(Self::from_fn((a1, a2 + b2, a3), |i, j, k| {
                    if j < a2 {
                        a.get(i, j, k)
                    } else {
                        b.get(i, j - a2, k)
                    }
                }))
            }
        }
    }

    /// Sub-tensor `X(rows, cols, :)` for arbitrary index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&i| i >= self.dims.0) || cols.iter().any(|&j| j >= self.dims.1) {
            return Err(TubalError::InvalidParameter(format!(
                "slice index out of bounds for dims {:?}",
                self.dims
            )));
        }
        Ok(Self::from_fn((rows.len(), cols.len(), self.dims.2), |i, j, k| {
            self.get(rows[i], cols[j], k)
        }))
    }

    /// Lateral slices `X(:, cols, :)`.
    pub fn lateral_slices(&self, cols: &[usize]) -> Result<Self> {
        let rows: Vec<usize> = (0..self.dims.0).collect();
        self.select(&rows, cols)
    }

    /// Horizontal slices `X(rows, :, :)`.
    pub fn horizontal_slices(&self, rows: &[usize]) -> Result<Self> {
        let cols: Vec<usize> = (0..self.dims.1).collect();
        self.select(rows, &cols)
    }

    /// Trace of the first frontal slice.
    pub fn trace_first_slice(&self) -> Result<f64> {
        let (n1, n2, _) = self.dims;
        if n1 != n2 {
            return Err(TubalError::DimMismatch {
                op: "trace_first_slice",
                left: self.dims,
                right: (n2, n1, self.dims.2),
            });
        }
        Ok((0..n1).map(|i| self.get(i, i, 0)).sum())
    }

    /// Largest absolute off-diagonal entry over all frontal slices.
    pub fn off_diagonal_max(&self) -> f64 {
        let (n1, n2, n3) = self.dims;
        let mut m = 0.0f64;
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    if i != j {
                        m = m.max(self.get(i, j, k).abs());
                    }
                }
            }
        }
        m
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor3{:?}", self.dims)?;
        if self.len() <= 64 {
            write!(f, " {:?}", self.values)?;
        }
        Ok(())
    }
}

pub fn identity_tensor(n: usize, depth: usize) -> Tensor3 {
    Tensor3::identity(n, depth)
}

pub fn t_transpose(x: &Tensor3) -> Tensor3 {
    x.transpose()
}

pub fn concat(a: &Tensor3, b: &Tensor3, mode: Mode) -> Result<Tensor3> {
    Tensor3::concat(a, b, mode)
}

pub fn fro_norm(x: &Tensor3) -> f64 {
    x.fro_norm()
}

pub fn hadamard(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    a.hadamard(b)
}
