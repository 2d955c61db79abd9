//! T-product factorizations.
//!
//! Each factorization transforms the input along mode 3, factors the stored
//! half of the Fourier slices independently and transforms back. The
//! `f*` functions work on spectra directly so that randomized algorithms can
//! chain several steps without leaving the Fourier domain.

pub(crate) mod slice;

use rayon::prelude::*;

use crate::error::{check_dims, Result, TubalError};
use crate::fourier::{fft_mode3, slice_weight, CMat, FourierTensor, C64};
use crate::tensor::Tensor3;
use slice::is_real_slice;

/// `X ≈ U * S * Vᵀ` with orthonormal `U`, `V` and f-diagonal `S`.
#[derive(Clone, Debug)]
pub struct TsvdFactors {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
}

impl TsvdFactors {
    /// Number of retained singular tubes.
    pub fn rank(&self) -> usize {
        self.s.rows()
    }

    pub fn reconstruct(&self) -> Result<Tensor3> {
        let u = fft_mode3(&self.u);
        let s = fft_mode3(&self.s);
        let v = fft_mode3(&self.v);
        u.mul(&s)?.mul_adjoint(&v)?.to_spatial()
    }

    /// Factors of the zero tensor of the given shape.
    pub fn empty(n1: usize, n2: usize, n3: usize) -> Self {
        Self {
            u: Tensor3::zeros((n1, 0, n3)),
            s: Tensor3::zeros((0, 0, n3)),
            v: Tensor3::zeros((n2, 0, n3)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QrFactors {
    pub q: Tensor3,
    pub r: Tensor3,
}

/// `X = V * D * Vᵀ` for symmetric `X`; `D` holds eigenvalues in ascending
/// order in every Fourier slice.
#[derive(Clone, Debug)]
pub struct EigFactors {
    pub v: Tensor3,
    pub d: Tensor3,
}

/// Spectral form of a T-SVD: per-slice singular values kept as plain
/// vectors next to the Fourier-domain singular vectors.
#[derive(Clone, Debug)]
pub(crate) struct FourierSvd {
    pub u: FourierTensor,
    pub s: Vec<Vec<f64>>,
    pub v: FourierTensor,
}

impl FourierSvd {
    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn truncate(self, r: usize) -> Self {
        let r = r.min(self.rank());
        Self {
            u: self.u.columns(0, r),
            s: self.s.into_iter().map(|v| v[..r].to_vec()).collect(),
            v: self.v.columns(0, r),
        }
    }

    pub fn s_tensor(&self) -> FourierTensor {
        let slices = self.s.iter().map(|s| diag(s)).collect();
        FourierTensor::from_slices_unchecked(self.u.depth(), slices)
    }

    /// Energy `Σ_{j>=r}` of the discarded tubes, via Parseval.
    pub fn tail_energy(&self, r: usize) -> f64 {
        let n3 = self.u.depth();
        let total: f64 = self
            .s
            .iter()
            .enumerate()
            .map(|(f, s)| slice_weight(f, n3) * s.iter().skip(r).map(|x| x * x).sum::<f64>())
            .sum();
        total / n3 as f64
    }

    pub fn into_factors(self) -> Result<TsvdFactors> {
        Ok(TsvdFactors {
            s: self.s_tensor().to_spatial()?,
            u: self.u.to_spatial()?,
            v: self.v.to_spatial()?,
        })
    }
}

fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(values[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Multiplies column `j` of every slice `f` by `factors[f][j]`.
pub(crate) fn scale_columns(x: &FourierTensor, factors: &[Vec<f64>]) -> FourierTensor {
    x.map_slices(|f, s| {
        let mut out = s.clone();
        for (j, &c) in factors[f].iter().enumerate() {
            for z in out.column_mut(j).iter_mut() {
                *z *= c;
            }
        }
        out
    })
}

fn par_slices<T: Send>(x: &FourierTensor, f: impl Fn(usize, &CMat, bool) -> T + Sync) -> Vec<T> {
    let n3 = x.depth();
    x.slices()
        .par_iter()
        .enumerate()
        .map(|(i, s)| f(i, s, is_real_slice(i, n3)))
        .collect()
}

pub(crate) fn fqr(x: &FourierTensor) -> (FourierTensor, FourierTensor) {
    let (q, r): (Vec<_>, Vec<_>) = par_slices(x, |_, s, real| slice::qr(s, real)).into_iter().unzip();
    let n3 = x.depth();
    (
        FourierTensor::from_slices_unchecked(n3, q),
        FourierTensor::from_slices_unchecked(n3, r),
    )
}

/// Orthonormal basis for the T-range of `x`. Lateral slices whose
/// triangular-factor diagonal is negligible in every Fourier slice are
/// dropped; a zero input yields a basis with no lateral slices.
pub(crate) fn forth(x: &FourierTensor) -> FourierTensor {
    let (n1, n2, n3) = x.dims();
    let (q, r) = fqr(x);
    let k = q.cols();
    let strength: Vec<f64> = (0..k)
        .map(|j| r.slices().iter().map(|s| s[(j, j)].norm()).fold(0.0, f64::max))
        .collect();
    let top = strength.iter().cloned().fold(0.0, f64::max);
    let tol = slice::cutoff(n1, n2, top);
    let keep: Vec<usize> = (0..k).filter(|&j| top > 0.0 && strength[j] > tol).collect();
    if keep.len() == k {
        return q;
    }
    let slices = q.slices().iter().map(|s| s.select_columns(&keep)).collect();
    FourierTensor::from_slices_unchecked(n3, slices)
}

pub(crate) fn fsvd(x: &FourierTensor) -> FourierSvd {
    let n3 = x.depth();
    let parts = par_slices(x, |_, s, real| slice::svd(s, real));
    let mut u = Vec::with_capacity(parts.len());
    let mut s = Vec::with_capacity(parts.len());
    let mut v = Vec::with_capacity(parts.len());
    for p in parts {
        u.push(p.u);
        s.push(p.s);
        v.push(p.v);
    }
    FourierSvd {
        u: FourierTensor::from_slices_unchecked(n3, u),
        s,
        v: FourierTensor::from_slices_unchecked(n3, v),
    }
}

pub(crate) fn fpinv(x: &FourierTensor) -> FourierTensor {
    let slices = par_slices(x, |_, s, real| slice::pinv(s, real));
    FourierTensor::from_slices_unchecked(x.depth(), slices)
}

/// `L` factor of a pivoted T-LU with the permutation folded in. It spans the
/// same range as `x` when `x` has full column rank, but is not orthonormal.
pub(crate) fn flu_basis(x: &FourierTensor) -> FourierTensor {
    let slices = par_slices(x, |_, s, real| slice::lu(s, real).0);
    FourierTensor::from_slices_unchecked(x.depth(), slices)
}

/// Per-slice Hermitian eigendecomposition, eigenvalues ascending.
pub(crate) fn feigh(x: &FourierTensor) -> (FourierTensor, Vec<Vec<f64>>) {
    let (v, d): (Vec<_>, Vec<_>) = par_slices(x, |_, s, real| slice::eigh(s, real)).into_iter().unzip();
    (FourierTensor::from_slices_unchecked(x.depth(), v), d)
}

/// Per-slice inverse, rejecting slices with condition number above
/// `1/(100·eps)`.
pub(crate) fn finv(x: &FourierTensor) -> Result<FourierTensor> {
    let limit = 1.0 / (100.0 * f64::EPSILON);
    let slices: Vec<Result<CMat>> = par_slices(x, |f, s, real| {
        let cond = slice::cond(s, real);
        if cond > limit {
            return Err(TubalError::SingularTensor { slice: f, cond });
        }
        slice::inverse(s, real).ok_or(TubalError::SingularTensor {
            slice: f,
            cond: f64::INFINITY,
        })
    });
    let slices: Result<Vec<CMat>> = slices.into_iter().collect();
    Ok(FourierTensor::from_slices_unchecked(x.depth(), slices?))
}

/// Economic T-QR: `Q` has `min(I1, I2)` orthonormal lateral slices.
pub fn t_qr(x: &Tensor3) -> Result<QrFactors> {
    let (q, r) = fqr(&fft_mode3(x));
    Ok(QrFactors {
        q: q.to_spatial()?,
        r: r.to_spatial()?,
    })
}

/// Orthonormal basis of the T-range of `x`, possibly with fewer lateral
/// slices than `x` when `x` is numerically rank deficient.
pub fn orth(x: &Tensor3) -> Result<Tensor3> {
    forth(&fft_mode3(x)).to_spatial()
}

pub fn t_svd(x: &Tensor3) -> Result<TsvdFactors> {
    fsvd(&fft_mode3(x)).into_factors()
}

/// Leading `r` singular tubes.
pub fn t_svd_truncated(x: &Tensor3, r: usize) -> Result<TsvdFactors> {
    let max = x.rows().min(x.cols());
    if r == 0 || r > max {
        return Err(TubalError::RankOutOfRange { rank: r, max });
    }
    fsvd(&fft_mode3(x)).truncate(r).into_factors()
}

/// Pivoted T-LU. The row permutation of each Fourier slice is folded into
/// `L`, so `L * U` reproduces `x`.
pub fn t_lu(x: &Tensor3) -> Result<(Tensor3, Tensor3)> {
    let xf = fft_mode3(x);
    let n3 = xf.depth();
    let parts = par_slices(&xf, |_, s, real| slice::lu(s, real));
    let mut l = Vec::with_capacity(parts.len());
    let mut u = Vec::with_capacity(parts.len());
    for (f, (lf, uf, singular)) in parts.into_iter().enumerate() {
        if singular {
            return Err(TubalError::SingularSlice { slice: f });
        }
        l.push(lf);
        u.push(uf);
    }
    Ok((
        FourierTensor::from_slices_unchecked(n3, l).to_spatial()?,
        FourierTensor::from_slices_unchecked(n3, u).to_spatial()?,
    ))
}

fn symmetry_check(x: &Tensor3) -> Result<()> {
    check_dims("t_eig", x.dims(), (x.cols(), x.rows(), x.depth()), x.rows() == x.cols())?;
    let deviation = x.sub(&x.transpose())?.fro_norm();
    if deviation > 1e-10 * x.fro_norm() {
        return Err(TubalError::NotSymmetric { deviation });
    }
    Ok(())
}

pub fn t_eig(x: &Tensor3) -> Result<EigFactors> {
    symmetry_check(x)?;
    let (v, d) = feigh(&fft_mode3(x));
    let dt = FourierTensor::from_slices_unchecked(x.depth(), d.iter().map(|s| diag(s)).collect());
    Ok(EigFactors {
        v: v.to_spatial()?,
        d: dt.to_spatial()?,
    })
}

/// Square root of an f-diagonal tensor, tube by tube in the Fourier domain.
/// Slightly negative real values from rounding are clamped to zero.
pub fn fdiag_sqrt(d: &Tensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = d.dims();
    if n1 != n2 || d.off_diagonal_max() > 1e-12 * d.max_abs() {
        return Err(TubalError::InvalidParameter(
            "square root needs a square f-diagonal tensor".into(),
        ));
    }
    let df = fft_mode3(d);
    let largest = df
        .slices()
        .iter()
        .flat_map(|s| (0..n1).map(move |i| s[(i, i)].norm()))
        .fold(0.0, f64::max);
    let mut slices = Vec::with_capacity(df.slices().len());
    for (f, s) in df.slices().iter().enumerate() {
        let mut out = CMat::zeros(n1, n1);
        for i in 0..n1 {
            let z = s[(i, i)];
            let real_valued = z.im.abs() <= 1e-12 * largest;
            out[(i, i)] = if real_valued && z.re < 0.0 {
                if z.re < -1e-6 * largest {
                    return Err(TubalError::NegativeSpectrum { slice: f, value: z.re });
                }
                C64::new(0.0, 0.0)
            } else if real_valued {
                C64::new(z.re.sqrt(), 0.0)
            } else {
                z.sqrt()
            };
        }
        slices.push(out);
    }
    FourierTensor::from_slices_unchecked(n3, slices).to_spatial()
}

/// Moore–Penrose pseudoinverse, slice by slice in the Fourier domain.
pub fn t_pinv(x: &Tensor3) -> Result<Tensor3> {
    fpinv(&fft_mode3(x)).to_spatial()
}

pub fn t_inv(x: &Tensor3) -> Result<Tensor3> {
    check_dims("t_inv", x.dims(), (x.cols(), x.rows(), x.depth()), x.rows() == x.cols())?;
    finv(&fft_mode3(x))?.to_spatial()
}

/// Number of singular tubes whose norm exceeds `tol` times the largest one.
pub fn tubal_rank(x: &Tensor3, tol: f64) -> usize {
    let f = fsvd(&fft_mode3(x));
    let n3 = x.depth();
    let k = f.rank();
    let norms: Vec<f64> = (0..k)
        .map(|j| {
            f.s.iter()
                .enumerate()
                .map(|(i, s)| slice_weight(i, n3) * s[j] * s[j])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let top = norms.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    norms.iter().filter(|&&v| v > tol * top).count()
}

pub fn trace_first_slice(x: &Tensor3) -> Result<f64> {
    x.trace_first_slice()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::t_product;
    use crate::random::{gauss_tensor, GaussKind};

    fn g(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        gauss_tensor(n1, n2, n3, GaussKind::Full, seed)
    }

    fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
        a.sub(b).unwrap().fro_norm() / b.fro_norm()
    }

    fn prod(a: &Tensor3, b: &Tensor3) -> Tensor3 {
        t_product(a, b).unwrap()
    }

    fn gram(q: &Tensor3) -> Tensor3 {
        prod(&q.transpose(), q)
    }

    fn lowrank(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> Tensor3 {
        prod(&g(n1, r, n3, seed), &g(r, n2, n3, seed + 1))
    }

    #[test]
    fn qr_of_identity() {
        let f = t_qr(&Tensor3::identity(4, 3)).unwrap();
        let id = Tensor3::identity(4, 3);
        // per-column signs are free, so compare products
        assert!(rel(&gram(&f.q), &id) < 1e-14);
        assert!(rel(&prod(&f.q, &f.r), &id) < 1e-14);
    }

    #[test]
    fn qr_reconstructs_random() {
        let x = g(30, 10, 7, 1);
        let f = t_qr(&x).unwrap();
        assert_eq!(f.q.dims(), (30, 10, 7));
        assert!(rel(&gram(&f.q), &Tensor3::identity(10, 7)) < 1e-10);
        assert!(rel(&prod(&f.q, &f.r), &x) < 1e-10);
    }

    #[test]
    fn qr_depth_one_matches_matrix_qr() {
        let x = g(6, 4, 1, 2);
        let f = t_qr(&x).unwrap();
        let m = nalgebra::DMatrix::from_column_slice(6, 4, x.as_slice());
        let r_ref = m.qr().r();
        for i in 0..4 {
            for j in 0..4 {
                assert!((f.r.get(i, j, 0).abs() - r_ref[(i, j)].abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orth_edge_cases() {
        let q = t_qr(&g(12, 4, 5, 3)).unwrap().q;
        let p = orth(&q).unwrap();
        assert!(rel(&gram(&p), &Tensor3::identity(p.cols(), 5)) < 1e-10);
        let proj = prod(&p, &prod(&p.transpose(), &q));
        assert!(proj.sub(&q).unwrap().fro_norm() <= 1e-10);

        let x = lowrank(20, 12, 6, 3, 4);
        let b = orth(&x).unwrap();
        assert_eq!(b.cols(), 3);
        let proj = prod(&b, &prod(&b.transpose(), &x));
        assert!(rel(&proj, &x) <= 1e-9);

        assert_eq!(orth(&Tensor3::zeros((5, 3, 4))).unwrap().dims(), (5, 0, 4));
    }

    #[test]
    fn svd_small_diagonal() {
        let x = Tensor3::from_vec((2, 2, 1), vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let f = t_svd(&x).unwrap();
        assert!((f.s.get(0, 0, 0) - 3.0).abs() < 1e-14);
        assert!((f.s.get(1, 1, 0) - 1.0).abs() < 1e-14);
        assert!((f.u.get(0, 0, 0).abs() - 1.0).abs() < 1e-14);
        assert!((f.v.get(1, 1, 0).abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstruction_and_norm() {
        let x = g(20, 15, 6, 5);
        let f = t_svd(&x).unwrap();
        assert_eq!(f.rank(), 15);
        assert!(rel(&f.reconstruct().unwrap(), &x) < 1e-10);
        assert!((x.fro_norm_sq() - f.s.fro_norm_sq()).abs() < 1e-10 * x.fro_norm_sq());
        assert!(f.s.off_diagonal_max() < 1e-12 * f.s.max_abs());
        assert!(rel(&gram(&f.u), &Tensor3::identity(15, 6)) < 1e-10);
        assert!(rel(&gram(&f.v), &Tensor3::identity(15, 6)) < 1e-10);
    }

    #[test]
    fn truncated_svd() {
        let x = g(8, 6, 4, 6);
        let full = t_svd(&x).unwrap();
        let top = t_svd_truncated(&x, 6).unwrap();
        assert!(rel(&top.reconstruct().unwrap(), &full.reconstruct().unwrap()) < 1e-12);

        let low = lowrank(20, 20, 5, 5, 7);
        let t5 = t_svd_truncated(&low, 5).unwrap();
        assert!(rel(&t5.reconstruct().unwrap(), &low) <= 1e-9);

        let t1 = t_svd_truncated(&x, 1).unwrap();
        let err = x.sub(&t1.reconstruct().unwrap()).unwrap().fro_norm();
        let tail = fsvd(&fft_mode3(&x)).tail_energy(1).sqrt();
        assert!((err - tail).abs() < 1e-10 * x.fro_norm());

        assert!(matches!(t_svd_truncated(&x, 0), Err(TubalError::RankOutOfRange { .. })));
        assert!(t_svd_truncated(&x, 7).is_err());
    }

    #[test]
    fn lu_cases() {
        let (l, u) = t_lu(&Tensor3::identity(3, 4)).unwrap();
        assert!(rel(&l, &Tensor3::identity(3, 4)) < 1e-15);
        assert!(rel(&u, &Tensor3::identity(3, 4)) < 1e-15);

        let x = g(30, 10, 5, 8);
        let (l, u) = t_lu(&x).unwrap();
        assert!(rel(&prod(&l, &u), &x) < 1e-10);

        let m = g(5, 5, 1, 9);
        let (l, u) = t_lu(&m).unwrap();
        let mat = nalgebra::DMatrix::from_column_slice(5, 5, m.as_slice());
        let (p, lr, ur) = mat.lu().unpack();
        let mut lp = lr.clone();
        p.inv_permute_rows(&mut lp);
        for (a, b) in l.as_slice().iter().zip(lp.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in u.as_slice().iter().zip(ur.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            t_lu(&Tensor3::zeros((3, 3, 2))),
            Err(TubalError::SingularSlice { .. })
        ));
    }

    #[test]
    fn eig_and_sqrt() {
        let e = t_eig(&Tensor3::identity(3, 4)).unwrap();
        assert!(rel(&e.d, &Tensor3::identity(3, 4)) < 1e-14);

        let y = g(9, 5, 6, 10);
        let z = gram(&y);
        let e = t_eig(&z).unwrap();
        let back = prod(&prod(&e.v, &e.d), &e.v.transpose());
        assert!(rel(&back, &z) < 1e-10);
        let (_, vals) = feigh(&fft_mode3(&z));
        assert!(vals.iter().flatten().all(|&v| v >= -1e-10));

        let root = fdiag_sqrt(&e.d).unwrap();
        assert!(rel(&prod(&root, &root), &e.d) < 1e-9);

        let four = Tensor3::identity(3, 2).scale(4.0);
        assert!(rel(&fdiag_sqrt(&four).unwrap(), &Tensor3::identity(3, 2).scale(2.0)) < 1e-15);

        let neg = Tensor3::identity(2, 1).scale(-1.0);
        assert!(matches!(fdiag_sqrt(&neg), Err(TubalError::NegativeSpectrum { .. })));
        assert!(matches!(t_eig(&g(4, 4, 3, 11)), Err(TubalError::NotSymmetric { .. })));
    }

    #[test]
    fn pinv_identities() {
        let q = t_qr(&g(10, 4, 3, 12)).unwrap().q;
        assert!(rel(&t_pinv(&q).unwrap(), &q.transpose()) < 1e-10);

        let a = g(8, 8, 4, 13);
        assert!(rel(&t_pinv(&a).unwrap(), &t_inv(&a).unwrap()) < 1e-9);

        for dims in [(12, 5, 3), (5, 12, 3), (7, 7, 2)] {
            let x = g(dims.0, dims.1, dims.2, 14);
            let p = t_pinv(&x).unwrap();
            let xp = prod(&x, &p);
            let px = prod(&p, &x);
            assert!(rel(&prod(&xp, &x), &x) < 1e-8);
            assert!(rel(&prod(&px, &p), &p) < 1e-8);
            assert!(rel(&xp.transpose(), &xp) < 1e-8);
            assert!(rel(&px.transpose(), &px) < 1e-8);
        }
    }

    #[test]
    fn inverse_cases() {
        let id = Tensor3::identity(3, 4);
        assert!(rel(&t_inv(&id).unwrap(), &id) < 1e-15);
        assert!(rel(&t_inv(&id.scale(2.0)).unwrap(), &id.scale(0.5)) < 1e-15);
        let a = g(6, 6, 5, 15).add(&Tensor3::identity(6, 5).scale(6.0)).unwrap();
        let inv = t_inv(&a).unwrap();
        assert!(rel(&prod(&inv, &a), &Tensor3::identity(6, 5)) < 1e-9);
        assert!(matches!(
            t_inv(&Tensor3::zeros((3, 3, 2))),
            Err(TubalError::SingularTensor { .. })
        ));
    }

    #[test]
    fn rank_counts() {
        assert_eq!(tubal_rank(&Tensor3::zeros((4, 4, 3)), 1e-8), 0);
        assert_eq!(tubal_rank(&Tensor3::identity(5, 4), 1e-8), 5);
        assert_eq!(tubal_rank(&lowrank(20, 20, 6, 5, 16), 1e-8), 5);
    }

    #[test]
    fn trace_matches_norm_of_factor() {
        assert_eq!(trace_first_slice(&Tensor3::identity(4, 3)).unwrap(), 4.0);
        let b = g(5, 7, 4, 17);
        let h = gram(&b);
        let t = trace_first_slice(&h).unwrap();
        assert!((t - b.fro_norm_sq()).abs() < 1e-10 * b.fro_norm_sq());
    }

    /// Reference that factors every one of the `I3` Fourier slices, including
    /// the conjugate half, and compares reconstructions.
    #[test]
    fn half_spectrum_matches_full_computation() {
        let x = g(6, 4, 5, 18);
        let n3 = 5;
        let full: Vec<CMat> = {
            let xf = fft_mode3(&x);
            (0..n3)
                .map(|f| {
                    if f < xf.slices().len() {
                        xf.slice(f).clone()
                    } else {
                        xf.slice(n3 - f).map(|z| z.conj())
                    }
                })
                .collect()
        };
        let svd_half = fsvd(&fft_mode3(&x)).truncate(2);
        for (f, s) in full.iter().enumerate() {
            let r = slice::svd(s, false);
            let us = CMat::from_fn(6, 2, |i, j| r.u[(i, j)] * r.s[j]);
            let rec = &us * r.v.columns(0, 2).adjoint();
            let hs = if f < svd_half.s.len() { f } else { n3 - f };
            let half_us = scale_columns(&svd_half.u, &svd_half.s);
            let mut rec_half = half_us.slice(hs) * svd_half.v.slice(hs).adjoint();
            if f >= svd_half.s.len() {
                rec_half = rec_half.map(|z| z.conj());
            }
            assert!((rec - rec_half).norm() < 1e-12 * s.norm());
        }
    }
}
