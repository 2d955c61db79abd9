//! One-view low tubal rank approximation.
//!
//! Every algorithm here touches the data exactly once: a single sweep forms
//! both the range sketch `X * Ω1` and the co-range sketch, and everything
//! after that works on sketches alone.

mod streaming;

pub use streaming::{sketch_finalize, sketch_ingest, SketchState};

use rand::seq::index::sample;

use crate::counted::CountedTensor;
use crate::error::{Dims, Result, TubalError};
use crate::fixed_precision::QbFactors;
use crate::fourier::{fft_mode3, FourierTensor};
use crate::linalg::{fpinv, fqr, fsvd, slice, TsvdFactors};
use crate::random::{gauss_from_rng, rng_from_seed, GaussKind};
use crate::tensor::Tensor3;

/// Sketch sizes for the stabilized algorithms: co-range size `l`, range size
/// `k`, truncation surplus `h` and target tubal rank `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchParams {
    pub l: usize,
    pub k: usize,
    pub h: usize,
    pub r: usize,
    pub seed: u64,
}

impl SketchParams {
    pub fn new(l: usize, k: usize, h: usize, r: usize, seed: u64) -> Self {
        Self { l, k, h, r, seed }
    }

    /// Checks `L >= K >= H`, `1 <= R <= K` and `K <= min(I1, I2)`.
    pub fn validate(&self, (n1, n2, _): Dims) -> Result<()> {
        let bad = |m: String| Err(TubalError::InvalidParameter(m));
        if self.r == 0 {
            return bad("target rank R must be at least 1".into());
        }
        if !(self.l >= self.k && self.k >= self.h) {
            return bad(format!(
                "sketch sizes need L >= K >= H, got L={} K={} H={}",
                self.l, self.k, self.h
            ));
        }
        if self.r > self.k {
            return bad(format!("target rank R={} exceeds K={}", self.r, self.k));
        }
        if self.k > n1.min(n2) {
            return bad(format!("K={} exceeds min(I1, I2)={}", self.k, n1.min(n2)));
        }
        Ok(())
    }

    /// Width of the refined bases in the two-sketch algorithms: `R + H`,
    /// capped by the range sketch size.
    fn refine_width(&self) -> usize {
        (self.r + self.h).min(self.k)
    }
}

/// Selects among the stabilized one-view algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinglePassAlg {
    /// Triangular solve on a truncated range basis.
    Alg6,
    /// Pseudoinverse with truncated range and co-range bases.
    Alg7,
    /// Two-sided variant.
    Alg8,
}

/// Cross approximation `X ≈ C * U * R` from sampled slices.
#[derive(Clone, Debug)]
pub struct CurFactors {
    pub c: Tensor3,
    pub u: Tensor3,
    pub r: Tensor3,
    pub lateral_idx: Vec<usize>,
    pub horizontal_idx: Vec<usize>,
}

impl CurFactors {
    pub fn reconstruct(&self) -> Result<Tensor3> {
        let c = fft_mode3(&self.c);
        c.mul(&fft_mode3(&self.u))?.mul(&fft_mode3(&self.r))?.to_spatial()
    }
}

/// Cross approximation from `l` uniformly sampled lateral slices and `k`
/// horizontal slices; the middle factor is the pseudoinverse of their
/// intersection.
pub fn alg4_tcur(x: &Tensor3, l: usize, k: usize, seed: u64) -> Result<CurFactors> {
    alg4_tcur_counted(&CountedTensor::new(x), l, k, seed)
}

pub fn alg4_tcur_counted(src: &CountedTensor, l: usize, k: usize, seed: u64) -> Result<CurFactors> {
    let (n1, n2, _) = src.dims();
    if l == 0 || l > n2 || k == 0 || k > n1 {
        return Err(TubalError::InvalidParameter(format!(
            "need 1 <= L <= {n2} and 1 <= K <= {n1}, got L={l} K={k}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut lateral_idx = sample(&mut rng, n2, l).into_vec();
    lateral_idx.sort_unstable();
    let mut horizontal_idx = sample(&mut rng, n1, k).into_vec();
    horizontal_idx.sort_unstable();

    let (c, r) = src.sample_slices(&horizontal_idx, &lateral_idx)?;
    let w = r.lateral_slices(&lateral_idx)?;
    let u = fpinv(&fft_mode3(&w)).to_spatial()?;
    Ok(CurFactors {
        c,
        u,
        r,
        lateral_idx,
        horizontal_idx,
    })
}

/// Range/co-range sketch approximation `X ≈ Q * (Ω2 * Q)† * (Ω2 * X)` with
/// `Ω1` of size `I2 x K` and `Ω2` of size `L x I1`.
pub fn alg5_qb(x: &Tensor3, l: usize, k: usize, seed: u64) -> Result<QbFactors> {
    alg5_qb_counted(&CountedTensor::new(x), l, k, seed)
}

pub fn alg5_qb_counted(src: &CountedTensor, l: usize, k: usize, seed: u64) -> Result<QbFactors> {
    let (n1, n2, n3) = src.dims();
    if l == 0 || k == 0 {
        return Err(TubalError::InvalidParameter("sketch sizes must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let omega1 = fft_mode3(&gauss_from_rng(&mut rng, (n2, k, n3), GaussKind::Full));
    let omega2 = fft_mode3(&gauss_from_rng(&mut rng, (l, n1, n3), GaussKind::Full));
    let (y, wt) = src.apply_both(&omega1, &omega2.transpose())?;
    let w = wt.transpose();
    let (q, _) = fqr(&y);
    let b = fpinv(&omega2.mul(&q)?).mul(&w)?;
    Ok(QbFactors::new(q.to_spatial()?, b.to_spatial()?))
}

pub fn alg6_single_pass(x: &Tensor3, p: &SketchParams) -> Result<TsvdFactors> {
    run_counted(&CountedTensor::new(x), p, SinglePassAlg::Alg6)
}

pub fn alg7_single_pass(x: &Tensor3, p: &SketchParams) -> Result<TsvdFactors> {
    run_counted(&CountedTensor::new(x), p, SinglePassAlg::Alg7)
}

pub fn alg8_two_sided(x: &Tensor3, p: &SketchParams) -> Result<TsvdFactors> {
    run_counted(&CountedTensor::new(x), p, SinglePassAlg::Alg8)
}

/// Runs one of the stabilized algorithms against a pass-counting source.
pub fn run_counted(src: &CountedTensor, p: &SketchParams, which: SinglePassAlg) -> Result<TsvdFactors> {
    p.validate(src.dims())?;
    let (omega1, omega2) = draw_tests(src.dims(), p, which);
    let (yc, yr) = src.apply_both(&omega1, &omega2)?;
    finalize(p, which, &omega1, &omega2, &yc, &yr)
}

/// Test tensors `Ω1` (`I2 x ·`) and `Ω2` (`I1 x ·`), drawn in that order
/// from one seeded stream.
pub(crate) fn draw_tests((n1, n2, n3): Dims, p: &SketchParams, which: SinglePassAlg) -> (FourierTensor, FourierTensor) {
    let extra = if which == SinglePassAlg::Alg6 { p.r } else { 0 };
    let mut rng = rng_from_seed(p.seed);
    let o1 = gauss_from_rng(&mut rng, (n2, p.k + extra, n3), GaussKind::Full);
    let o2 = gauss_from_rng(&mut rng, (n1, p.l + extra, n3), GaussKind::Full);
    (fft_mode3(&o1), fft_mode3(&o2))
}

/// Leading left singular tubes of the triangular factor of `y`, lifted back
/// by the orthonormal factor: an orthonormal basis of width at most `width`
/// for the dominant range of `y`.
fn refined_basis(y: &FourierTensor, width: usize) -> Result<FourierTensor> {
    let (q, r) = fqr(y);
    let lead = fsvd(&r).truncate(width);
    q.mul(&lead.u)
}

/// Post-sketch stages, shared by the batch and streaming paths.
pub(crate) fn finalize(
    p: &SketchParams,
    which: SinglePassAlg,
    omega1: &FourierTensor,
    omega2: &FourierTensor,
    yc: &FourierTensor,
    yr: &FourierTensor,
) -> Result<TsvdFactors> {
    match which {
        SinglePassAlg::Alg6 => {
            let qc = if p.h < p.k {
                refined_basis(yc, p.r + p.h)?
            } else {
                fqr(yc).0
            };
            let (qh, rh) = fqr(&omega2.adjoint_mul(&qc)?);
            let limit = 1.0 / (100.0 * f64::EPSILON);
            let n3 = rh.depth();
            let rinv = rh.try_map_slices(|f, s| {
                let real = slice::is_real_slice(f, n3);
                let cond = slice::cond(s, real);
                if cond > limit {
                    return Err(TubalError::SingularTriangular { slice: f, cond });
                }
                slice::inverse(s, real).ok_or(TubalError::SingularTriangular {
                    slice: f,
                    cond: f64::INFINITY,
                })
            })?;
            let z = rinv.mul(&qh.adjoint_mul(&yr.transpose())?)?;
            let top = fsvd(&z).truncate(p.r);
            TsvdFactors::lift(qc.mul(&top.u)?, &top)
        }
        SinglePassAlg::Alg7 => {
            let width = p.refine_width();
            let qc = refined_basis(yc, width)?;
            let qr = refined_basis(yr, width)?;
            let z = fpinv(&omega2.adjoint_mul(&qc)?).mul(&yr.adjoint_mul(&qr)?)?;
            let top = fsvd(&z).truncate(p.r);
            let v = qr.mul(&top.v)?;
            TsvdFactors::lift_both(qc.mul(&top.u)?, &top, v)
        }
        SinglePassAlg::Alg8 => {
            let width = p.refine_width();
            let qc = refined_basis(yc, width)?;
            let qr = refined_basis(yr, width)?;
            let b = qc.adjoint_mul(yc)?.mul(&fpinv(&qr.adjoint_mul(omega1)?))?;
            let top = fsvd(&b).truncate(p.r);
            let v = qr.mul(&top.v)?;
            TsvdFactors::lift_both(qc.mul(&top.u)?, &top, v)
        }
    }
}

impl TsvdFactors {
    fn lift(u: FourierTensor, svd: &crate::linalg::FourierSvd) -> Result<Self> {
        Self::lift_both(u, svd, svd.v.clone())
    }

    fn lift_both(u: FourierTensor, svd: &crate::linalg::FourierSvd, v: FourierTensor) -> Result<Self> {
        Ok(Self {
            u: u.to_spatial()?,
            s: svd.s_tensor().to_spatial()?,
            v: v.to_spatial()?,
        })
    }
}
