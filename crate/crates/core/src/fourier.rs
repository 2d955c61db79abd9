//! Mode-3 DFT representation and the slice-wise T-product algebra.
//!
//! A real tensor's spectrum is conjugate symmetric along mode 3, so only the
//! first `floor(I3/2) + 1` Fourier slices are stored. Slice `f` for
//! `f >= floor(I3/2) + 1` is `conj(slice[I3 - f])` (0-based).
//!
//! The forward transform is unnormalized; the inverse carries the `1/I3`.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{check_dims, Dims, Result, TubalError};
use crate::tensor::{Mode, Tensor3};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Relative imaginary residue above which an inverse transform is rejected.
pub const SYMMETRY_TOL: f64 = 1e-6;

/// Number of stored Fourier slices for depth `n3`, i.e. `ceil((n3 + 1) / 2)`.
pub fn half_len(n3: usize) -> usize {
    n3 / 2 + 1
}

/// Multiplicity of stored slice `f` in the full spectrum (1 for the DC and
/// Nyquist slices, 2 for slices that stand in for a conjugate partner).
pub fn slice_weight(f: usize, n3: usize) -> f64 {
    if f == 0 || (n3.is_multiple_of(2) && f == n3 / 2) {
        1.0
    } else {
        2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierTensor {
    dims: Dims,
    slices: Vec<CMat>,
}

impl FourierTensor {
    /// Assembles a spectrum from its stored slices. All slices must share one
    /// shape, and there must be exactly `half_len(depth)` of them.
    pub fn from_slices(depth: usize, slices: Vec<CMat>) -> Result<Self> {
        if depth == 0 || slices.len() != half_len(depth) {
            return Err(TubalError::InvalidParameter(format!(
                "depth {depth} needs {} Fourier slices, got {}",
                half_len(depth.max(1)),
                slices.len()
            )));
        }
        let (r, c) = slices[0].shape();
        if slices.iter().any(|s| s.shape() != (r, c)) {
            return Err(TubalError::InvalidParameter("Fourier slices differ in shape".into()));
        }
        Ok(Self {
            dims: (r, c, depth),
            slices,
        })
    }

    pub(crate) fn from_slices_unchecked(depth: usize, slices: Vec<CMat>) -> Self {
        let (r, c) = slices[0].shape();
        Self {
            dims: (r, c, depth),
            slices,
        }
    }

    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            slices: vec![CMat::zeros(dims.0, dims.1); half_len(dims.2)],
        }
    }

    pub fn identity(n: usize, depth: usize) -> Self {
        Self {
            dims: (n, n, depth),
            slices: vec![CMat::identity(n, n); half_len(depth)],
        }
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

    pub fn slices(&self) -> &[CMat] {
        &self.slices
    }

    pub fn slice(&self, f: usize) -> &CMat {
        &self.slices[f]
    }

    pub fn into_slices(self) -> Vec<CMat> {
        self.slices
    }

    /// Applies `f` to every stored slice. `f` receives the slice index.
    pub fn map_slices(&self, f: impl Fn(usize, &CMat) -> CMat + Sync) -> Self {
        let slices: Vec<CMat> = self.slices.par_iter().enumerate().map(|(i, s)| f(i, s)).collect();
        Self::from_slices_unchecked(self.dims.2, slices)
    }

    /// Fallible variant of [`map_slices`](Self::map_slices); the first error
    /// in slice order is returned.
    pub fn try_map_slices(&self, f: impl Fn(usize, &CMat) -> Result<CMat> + Sync) -> Result<Self> {
        let slices: Result<Vec<CMat>> = self.slices.par_iter().enumerate().map(|(i, s)| f(i, s)).collect();
        Ok(Self::from_slices_unchecked(self.dims.2, slices?))
    }

    /// T-product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dims(
            "t_product",
            self.dims,
            other.dims,
            self.dims.1 == other.dims.0 && self.dims.2 == other.dims.2,
        )?;
        Ok(self.zip_map(other, cmul))
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self> {
        check_dims(
            "transpose product",
            self.dims,
            other.dims,
            self.dims.0 == other.dims.0 && self.dims.2 == other.dims.2,
        )?;
        Ok(self.zip_map(other, |a, b| cmul(&a.adjoint(), b)))
    }

    /// `self * otherᵀ`.
    pub fn mul_adjoint(&self, other: &Self) -> Result<Self> {
        check_dims(
            "product with transpose",
            self.dims,
            other.dims,
            self.dims.1 == other.dims.1 && self.dims.2 == other.dims.2,
        )?;
        Ok(self.zip_map(other, |a, b| cmul(a, &b.adjoint())))
    }

    /// Tensor transpose; in the Fourier domain each slice is conjugate
    /// transposed.
    pub fn transpose(&self) -> Self {
        let slices = self.slices.iter().map(|s| s.adjoint()).collect();
        Self {
            dims: (self.dims.1, self.dims.0, self.dims.2),
            slices,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims("add", self.dims, other.dims, self.dims == other.dims)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims("sub", self.dims, other.dims, self.dims == other.dims)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map_slices(|_, s| s * C64::new(alpha, 0.0))
    }

    fn zip_map(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat + Sync) -> Self {
        let slices: Vec<CMat> = self
            .slices
            .par_iter()
            .zip(other.slices.par_iter())
            .map(|(a, b)| f(a, b))
            .collect();
        let (r, c) = slices[0].shape();
        Self {
            dims: (r, c, self.dims.2),
            slices,
        }
    }

    /// Concatenation along mode 1 or 2. Operands with no entries act as the
    /// empty tensor.
    pub fn concat(&self, other: &Self, mode: Mode) -> Result<Self> {
        if self.rows() * self.cols() == 0 && other.rows() * other.cols() != 0 {
            return Ok(other.clone());
        }
        if other.rows() * other.cols() == 0 {
            return Ok(self.clone());
        }
        let ok = self.dims.2 == other.dims.2
            && match mode {
                Mode::First => self.dims.1 == other.dims.1,
                Mode::Second => self.dims.0 == other.dims.0,
            };
        check_dims("concat", self.dims, other.dims, ok)?;
        Ok(self.zip_map(other, |a, b| match mode {
            Mode::First => {
                let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
                m.rows_mut(0, a.nrows()).copy_from(a);
                m.rows_mut(a.nrows(), b.nrows()).copy_from(b);
                m
            }
            Mode::Second => {
                let mut m = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
                m.columns_mut(0, a.ncols()).copy_from(a);
                m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
                m
            }
        }))
    }

    /// Lateral slices `start..start+count`.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        let slices = self
            .slices
            .iter()
            .map(|s| s.columns(start, count).into_owned())
            .collect();
        Self {
            dims: (self.dims.0, count, self.dims.2),
            slices,
        }
    }

    /// Horizontal slices `start..start+count`.
    pub fn rows_range(&self, start: usize, count: usize) -> Self {
        let slices = self.slices.iter().map(|s| s.rows(start, count).into_owned()).collect();
        Self {
            dims: (count, self.dims.1, self.dims.2),
            slices,
        }
    }

    /// `‖X‖²_F` via Parseval: `(1/I3) Σ_f ‖X̂_f‖²_F` over the full spectrum.
    pub fn fro_norm_sq(&self) -> f64 {
        let n3 = self.dims.2;
        let total: f64 = self
            .slices
            .iter()
            .enumerate()
            .map(|(f, s)| slice_weight(f, n3) * s.norm_squared())
            .sum();
        total / n3 as f64
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    /// Trace of the first spatial frontal slice, `(1/I3) Σ_f tr(X̂_f)`.
    pub fn trace_first_slice(&self) -> Result<f64> {
        check_dims(
            "trace_first_slice",
            self.dims,
            (self.dims.1, self.dims.0, self.dims.2),
            self.dims.0 == self.dims.1,
        )?;
        let n3 = self.dims.2;
        let total: f64 = self
            .slices
            .iter()
            .enumerate()
            .map(|(f, s)| slice_weight(f, n3) * s.trace().re)
            .sum();
        Ok(total / n3 as f64)
    }

    pub fn to_spatial(&self) -> Result<Tensor3> {
        ifft_mode3(self)
    }

    /// Inverse transform that also reports the discarded imaginary residue
    /// `‖Im‖_F`, without applying the symmetry check.
    pub fn to_spatial_with_residue(&self) -> (Tensor3, f64) {
        inverse_raw(self)
    }
}

/// Complex product computed as four real GEMMs on split real/imaginary parts,
/// which is much faster than the generic complex kernel.
pub(crate) fn cmul(a: &CMat, b: &CMat) -> CMat {
    let (m, k) = a.shape();
    let n = b.ncols();
    if m * k * n <= 4096 {
        return a * b;
    }
    let ar = a.map(|z| z.re);
    let ai = a.map(|z| z.im);
    let br = b.map(|z| z.re);
    let bi = b.map(|z| z.im);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, C64::new)
}

/// Unnormalized DFT of every mode-3 tube, keeping the non-redundant half.
pub fn fft_mode3(x: &Tensor3) -> FourierTensor {
    let (n1, n2, n3) = x.dims();
    let tubes = n1 * n2;
    let nf = half_len(n3);
    if tubes == 0 {
        return FourierTensor::zeros(x.dims());
    }
    // tube-major buffer: tube t occupies buf[t*n3 .. (t+1)*n3]
    let mut buf = vec![C64::new(0.0, 0.0); tubes * n3];
    let data = x.as_slice();
    for k in 0..n3 {
        let slice = &data[k * tubes..(k + 1) * tubes];
        for (t, &v) in slice.iter().enumerate() {
            buf[t * n3 + k] = C64::new(v, 0.0);
        }
    }
    if n3 > 1 {
        let fft = FftPlanner::<f64>::new().plan_fft_forward(n3);
        let chunk = n3 * 256;
        buf.par_chunks_mut(chunk).for_each(|c| fft.process(c));
    }
    // DC and Nyquist bins of a real tube are real; drop the twiddle round-off
    // so ill-conditioned slice solves cannot amplify it.
    let slices = (0..nf)
        .map(|f| {
            let real = slice_weight(f, n3) == 1.0;
            CMat::from_fn(n1, n2, |i, j| {
                let z = buf[(i + n1 * j) * n3 + f];
                if real {
                    C64::new(z.re, 0.0)
                } else {
                    z
                }
            })
        })
        .collect();
    FourierTensor { dims: x.dims(), slices }
}

fn inverse_raw(xf: &FourierTensor) -> (Tensor3, f64) {
    let (n1, n2, n3) = xf.dims;
    let tubes = n1 * n2;
    let nf = half_len(n3);
    if tubes == 0 {
        return (Tensor3::zeros(xf.dims), 0.0);
    }
    let mut buf = vec![C64::new(0.0, 0.0); tubes * n3];
    for (f, s) in xf.slices.iter().enumerate() {
        for j in 0..n2 {
            for i in 0..n1 {
                let t = i + n1 * j;
                let z = s[(i, j)];
                buf[t * n3 + f] = z;
                if f > 0 && n3 - f >= nf {
                    buf[t * n3 + (n3 - f)] = z.conj();
                }
            }
        }
    }
    if n3 > 1 {
        let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n3);
        let chunk = n3 * 256;
        buf.par_chunks_mut(chunk).for_each(|c| ifft.process(c));
    }
    let scale = 1.0 / n3 as f64;
    let mut values = vec![0.0; tubes * n3];
    let mut imag_sq = 0.0;
    for t in 0..tubes {
        for k in 0..n3 {
            let z = buf[t * n3 + k] * scale;
            values[k * tubes + t] = z.re;
            imag_sq += z.im * z.im;
        }
    }
    (Tensor3::from_raw(xf.dims, values), imag_sq.sqrt())
}

/// Inverse mode-3 DFT with `1/I3` scaling. The stored half spectrum is
/// extended by conjugate symmetry; an imaginary residue above
/// `SYMMETRY_TOL · ‖X‖_F` means the spectrum did not come from a real tensor.
pub fn ifft_mode3(xf: &FourierTensor) -> Result<Tensor3> {
    let (x, residue) = inverse_raw(xf);
    let norm = x.fro_norm();
    if residue > SYMMETRY_TOL * norm && residue > f64::MIN_POSITIVE {
        return Err(TubalError::SymmetryViolation { residue, norm });
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(TubalError::NonFinite {
            index: x.as_slice().iter().position(|v| !v.is_finite()).unwrap(),
        });
    }
    Ok(x)
}

/// T-product `a * b` computed slice-wise in the Fourier domain.
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_dims(
        "t_product",
        a.dims(),
        b.dims(),
        a.cols() == b.rows() && a.depth() == b.depth(),
    )?;
    fft_mode3(a).mul(&fft_mode3(b))?.to_spatial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gauss_tensor, GaussKind};

    fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
        a.sub(b).unwrap().fro_norm() / b.fro_norm().max(f64::MIN_POSITIVE)
    }

    /// Block-circulant definition: C(:,:,k) = Σ_m A(:,:,(k-m) mod n3) B(:,:,m).
    fn circulant_product(a: &Tensor3, b: &Tensor3) -> Tensor3 {
        let (n1, n2, n3) = a.dims();
        let n4 = b.cols();
        Tensor3::from_fn((n1, n4, n3), |i, j, k| {
            let mut s = 0.0;
            for m in 0..n3 {
                let ka = (k + n3 - m) % n3;
                for p in 0..n2 {
                    s += a.get(i, p, ka) * b.get(p, j, m);
                }
            }
            s
        })
    }

    #[test]
    fn half_length_matches_ceiling_formula() {
        for n3 in 1..20usize {
            assert_eq!(half_len(n3), (n3 + 2) / 2); // ceil((n3+1)/2)
        }
    }

    #[test]
    fn dft_of_small_tubes() {
        let c = Tensor3::from_vec((1, 1, 2), vec![1.0, 1.0]).unwrap();
        let cf = fft_mode3(&c);
        assert_eq!(cf.slice(0)[(0, 0)], C64::new(2.0, 0.0));
        assert_eq!(cf.slice(1)[(0, 0)], C64::new(0.0, 0.0));

        let d = Tensor3::from_vec((1, 1, 2), vec![1.0, 0.0]).unwrap();
        let df = fft_mode3(&d);
        assert_eq!(df.slice(0)[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(df.slice(1)[(0, 0)], C64::new(1.0, 0.0));

        let back = ifft_mode3(&cf).unwrap();
        assert_eq!(back.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn round_trip_random() {
        let x = gauss_tensor(4, 3, 5, GaussKind::Full, 11);
        let back = ifft_mode3(&fft_mode3(&x)).unwrap();
        assert!(rel(&back, &x) < 1e-12);
        let id = Tensor3::identity(3, 4);
        assert!(rel(&ifft_mode3(&fft_mode3(&id)).unwrap(), &id) < 1e-15);
    }

    #[test]
    fn identity_spectrum_is_flat() {
        let f = fft_mode3(&Tensor3::identity(3, 6));
        for s in f.slices() {
            assert!((s - CMat::identity(3, 3)).norm() < 1e-15);
        }
    }

    #[test]
    fn corrupted_spectrum_is_rejected() {
        let x = gauss_tensor(2, 2, 4, GaussKind::Full, 3);
        let mut slices = fft_mode3(&x).into_slices();
        slices[0][(0, 1)] += C64::new(0.0, 5.0);
        let bad = FourierTensor::from_slices(4, slices).unwrap();
        assert!(matches!(ifft_mode3(&bad), Err(TubalError::SymmetryViolation { .. })));
    }

    #[test]
    fn product_of_tubes_is_circular_convolution() {
        let a = Tensor3::from_vec((1, 1, 2), vec![1.0, 2.0]).unwrap();
        let b = Tensor3::from_vec((1, 1, 2), vec![3.0, 4.0]).unwrap();
        let c = t_product(&a, &b).unwrap();
        assert!((c.get(0, 0, 0) - 11.0).abs() < 1e-12);
        assert!((c.get(0, 0, 1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn depth_one_is_matrix_product() {
        // [[1,2],[3,4]] in column-major order
        let a = Tensor3::from_vec((2, 2, 1), vec![1.0, 3.0, 2.0, 4.0]).unwrap();
        let b = Tensor3::from_vec((2, 1, 1), vec![5.0, 6.0]).unwrap();
        let c = t_product(&a, &b).unwrap();
        assert_eq!(c.dims(), (2, 1, 1));
        assert!((c.get(0, 0, 0) - 17.0).abs() < 1e-12);
        assert!((c.get(1, 0, 0) - 39.0).abs() < 1e-12);
    }

    #[test]
    fn matches_block_circulant_definition() {
        for (seed, n3) in [(1u64, 1usize), (2, 2), (3, 5), (4, 6)] {
            let a = gauss_tensor(3, 4, n3, GaussKind::Full, seed);
            let b = gauss_tensor(4, 2, n3, GaussKind::Full, seed + 100);
            let fast = t_product(&a, &b).unwrap();
            assert!(rel(&fast, &circulant_product(&a, &b)) < 1e-13);
        }
    }

    #[test]
    fn large_products_use_split_kernel_correctly() {
        let a = gauss_tensor(30, 40, 3, GaussKind::Full, 5);
        let b = gauss_tensor(40, 20, 3, GaussKind::Full, 6);
        let (fa, fb) = (fft_mode3(&a), fft_mode3(&b));
        for f in 0..2 {
            let direct = fa.slice(f) * fb.slice(f);
            assert!((cmul(fa.slice(f), fb.slice(f)) - &direct).norm() < 1e-11 * direct.norm());
        }
    }

    #[test]
    fn identity_and_dim_checks() {
        let x = gauss_tensor(3, 5, 4, GaussKind::Full, 9);
        let left = t_product(&Tensor3::identity(3, 4), &x).unwrap();
        let right = t_product(&x, &Tensor3::identity(5, 4)).unwrap();
        assert!(rel(&left, &x) < 1e-12 && rel(&right, &x) < 1e-12);
        assert!(matches!(t_product(&x, &x), Err(TubalError::DimMismatch { .. })));
        let deeper = gauss_tensor(5, 2, 3, GaussKind::Full, 1);
        assert!(t_product(&x, &deeper).is_err());
    }

    #[test]
    fn transpose_matches_adjoint_slices() {
        let x = gauss_tensor(3, 4, 5, GaussKind::Full, 21);
        let via_fourier = fft_mode3(&x).transpose().to_spatial().unwrap();
        assert!(rel(&via_fourier, &x.transpose()) < 1e-13);
    }

    #[test]
    fn parseval_and_trace() {
        let x = gauss_tensor(4, 4, 7, GaussKind::Full, 8);
        let f = fft_mode3(&x);
        assert!((f.fro_norm_sq() - x.fro_norm_sq()).abs() < 1e-12 * x.fro_norm_sq());
        let t = f.trace_first_slice().unwrap();
        assert!((t - x.trace_first_slice().unwrap()).abs() < 1e-12);
        let even = gauss_tensor(3, 2, 6, GaussKind::Full, 4);
        let fe = fft_mode3(&even);
        assert!((fe.fro_norm_sq() - even.fro_norm_sq()).abs() < 1e-12 * even.fro_norm_sq());
    }

    #[test]
    fn real_bins_are_exactly_real() {
        for n3 in [7, 60] {
            let x = gauss_tensor(3, 4, n3, GaussKind::Full, 2);
            let f = fft_mode3(&x);
            for (k, s) in f.slices().iter().enumerate() {
                if slice_weight(k, n3) == 1.0 {
                    assert!(s.iter().all(|z| z.im == 0.0), "bin {k} of {n3}");
                }
            }
        }
    }
}
