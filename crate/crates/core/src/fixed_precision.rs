//! Rank-adaptive QB approximation.
//!
//! All three algorithms grow `Q` and `B` block by block until the relative
//! residual `‖X − Q*B‖_F / ‖X‖_F` drops below `eps`. The residual is never
//! formed explicitly: with orthonormal `Q` and `B = Qᵀ*X`,
//! `‖X − Q*B‖² = ‖X‖² − ‖B‖²`, so a running energy count suffices.

use rand::Rng;

use crate::counted::CountedTensor;
use crate::error::{Dims, Result, TubalError};
use crate::fourier::{cmul, fft_mode3, slice_weight, CMat, FourierTensor};
use crate::linalg::{feigh, flu_basis, forth, fsvd, scale_columns, TsvdFactors};
use crate::random::{gauss_from_rng, rng_from_seed, GaussKind};
use crate::tensor::{Mode, Tensor3};

/// `X ≈ Q * B` with orthonormal `Q`.
#[derive(Clone, Debug)]
pub struct QbFactors {
    pub q: Tensor3,
    pub b: Tensor3,
    /// Remaining energy estimate after each block (absolute, same units as
    /// `‖X‖²`). Empty for methods that are not rank adaptive.
    pub energy_trace: Vec<f64>,
}

impl QbFactors {
    pub fn new(q: Tensor3, b: Tensor3) -> Self {
        Self {
            q,
            b,
            energy_trace: Vec::new(),
        }
    }

    /// Accumulated rank, the number of lateral slices of `Q`.
    pub fn rank(&self) -> usize {
        self.q.cols()
    }

    pub fn reconstruct(&self) -> Result<Tensor3> {
        fft_mode3(&self.q).mul(&fft_mode3(&self.b))?.to_spatial()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPrecisionConfig {
    /// Target relative Frobenius error.
    pub eps: f64,
    /// Columns added per block.
    pub block: usize,
    /// Power iterations, or for the pass-efficient variant the total number
    /// of data passes per block.
    pub q: usize,
    /// Safety cap on the accumulated rank; `None` means `min(I1, I2)`.
    pub max_rank: Option<usize>,
    pub seed: u64,
}

impl FixedPrecisionConfig {
    pub fn new(eps: f64, block: usize, q: usize, seed: u64) -> Self {
        Self {
            eps,
            block,
            q,
            max_rank: None,
            seed,
        }
    }

    pub fn with_max_rank(mut self, max_rank: usize) -> Self {
        self.max_rank = Some(max_rank);
        self
    }

    fn cap(&self, (n1, n2, _): Dims) -> Result<usize> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(TubalError::InvalidParameter(format!(
                "error bound must be positive, got {}",
                self.eps
            )));
        }
        if self.block == 0 {
            return Err(TubalError::InvalidParameter("block size must be at least 1".into()));
        }
        let full = n1.min(n2);
        match self.max_rank {
            Some(m) if m == 0 || m > full => {
                Err(TubalError::InvalidParameter(format!("rank cap {m} outside 1..={full}")))
            }
            Some(m) => Ok(m),
            None => Ok(full),
        }
    }
}

/// Accumulated factors in the Fourier domain plus the bookkeeping shared by
/// the blocked algorithms.
struct Accumulator {
    q: FourierTensor,
    b: FourierTensor,
    trace: Vec<f64>,
    full_rank: usize,
    cap: usize,
}

enum Step {
    Continue,
    Done,
}

impl Accumulator {
    fn new(dims: Dims, cap: usize) -> Self {
        Self {
            q: FourierTensor::zeros((dims.0, 0, dims.2)),
            b: FourierTensor::zeros((0, dims.1, dims.2)),
            trace: Vec::new(),
            full_rank: dims.0.min(dims.1),
            cap,
        }
    }

    fn rank(&self) -> usize {
        self.q.cols()
    }

    fn width(&self, block: usize) -> usize {
        block.min(self.cap - self.rank())
    }

    /// `Y − Q * (B * Ω)`, the sketch of the current residual.
    fn deflate(&self, y: FourierTensor, omega: &FourierTensor) -> Result<FourierTensor> {
        if self.rank() == 0 {
            return Ok(y);
        }
        y.sub(&self.q.mul(&self.b.mul(omega)?)?)
    }

    /// `Qi − Q * (Qᵀ * Qi)`, re-orthonormalized.
    fn reorthogonalize(&self, qi: &FourierTensor) -> Result<FourierTensor> {
        if self.rank() == 0 {
            return Ok(forth(qi));
        }
        Ok(forth(&qi.sub(&self.q.mul(&self.q.adjoint_mul(qi)?)?)?))
    }

    /// Appends a block and decides whether to stop. `energy` is `‖X‖²`.
    fn push(&mut self, qi: FourierTensor, bi: FourierTensor, energy: f64, eps: f64) -> Result<Step> {
        let added = qi.cols();
        let previous = self.trace.last().copied().unwrap_or(energy);
        let remaining = previous - bi.fro_norm_sq();
        self.q = self.q.concat(&qi, Mode::Second)?;
        self.b = self.b.concat(&bi, Mode::First)?;
        self.trace.push(remaining);
        let k = self.rank();
        if remaining < eps * eps * energy || k >= self.full_rank || added == 0 {
            return Ok(Step::Done);
        }
        if k >= self.cap {
            return Err(TubalError::RankCapExceeded {
                max_rank: self.cap,
                residual: remaining.max(0.0).sqrt(),
                factors: Box::new(QbFactors {
                    q: self.q.to_spatial()?,
                    b: self.b.to_spatial()?,
                    energy_trace: self.trace.clone(),
                }),
            });
        }
        Ok(Step::Continue)
    }

    fn finish(self) -> Result<QbFactors> {
        Ok(QbFactors {
            q: self.q.to_spatial()?,
            b: self.b.to_spatial()?,
            energy_trace: self.trace,
        })
    }
}

fn gaussian(rng: &mut impl Rng, dims: Dims) -> FourierTensor {
    fft_mode3(&gauss_from_rng(rng, dims, GaussKind::Full))
}

fn empty_factors((n1, n2, n3): Dims) -> QbFactors {
    QbFactors::new(Tensor3::zeros((n1, 0, n3)), Tensor3::zeros((0, n2, n3)))
}

/// Blocked randomized QB with `q` power iterations per block; each block
/// costs `2q + 2` passes over the data.
pub fn alg9_fixed_precision(x: &Tensor3, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    alg9_counted(&CountedTensor::new(x), cfg)
}

pub fn alg9_counted(src: &CountedTensor, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    let dims = src.dims();
    let cap = cfg.cap(dims)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut acc = Accumulator::new(dims, cap);
    loop {
        let b = acc.width(cfg.block);
        let omega = gaussian(&mut rng, (dims.1, b, dims.2));
        let y = src.apply(&omega)?;
        let energy = src.energy();
        if energy == 0.0 {
            return Ok(empty_factors(dims));
        }
        let mut qi = forth(&acc.deflate(y, &omega)?);
        for _ in 0..cfg.q {
            // residual co-range: Xᵀ Qi − Bᵀ (Qᵀ Qi)
            let mut z = src.apply_transpose(&qi)?;
            if acc.rank() > 0 {
                z = z.sub(&acc.b.adjoint_mul(&acc.q.adjoint_mul(&qi)?)?)?;
            }
            let zi = forth(&z);
            qi = forth(&acc.deflate(src.apply(&zi)?, &zi)?);
        }
        let qi = acc.reorthogonalize(&qi)?;
        let bi = src.apply_transpose(&qi)?.transpose();
        match acc.push(qi, bi, energy, cfg.eps)? {
            Step::Done => return acc.finish(),
            Step::Continue => {}
        }
    }
}

/// Pass-efficient blocked QB: every block reads the data exactly `q` times
/// (`q > 2`), using LU bases in the inner rounds.
pub fn alg10_fixed_precision(x: &Tensor3, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    alg10_counted(&CountedTensor::new(x), cfg)
}

pub fn alg10_counted(src: &CountedTensor, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    if cfg.q <= 2 {
        return Err(TubalError::InvalidParameter(format!(
            "pass count must exceed 2, got {}",
            cfg.q
        )));
    }
    let dims = src.dims();
    let cap = cfg.cap(dims)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut acc = Accumulator::new(dims, cap);
    let rounds = (cfg.q - 1) / 2;
    loop {
        let b = acc.width(cfg.block);
        let mut ql = if cfg.q.is_multiple_of(2) {
            let omega = gaussian(&mut rng, (dims.1, b, dims.2));
            let y = acc.deflate(src.apply(&omega)?, &omega)?;
            flu_basis(&y)
        } else {
            gaussian(&mut rng, (dims.0, b, dims.2))
        };
        for t in 1..=rounds {
            let r = src.apply_transpose(&ql)?;
            if t == rounds {
                ql = forth(&acc.deflate(src.apply(&r)?, &r)?);
            } else {
                ql = flu_basis(&src.apply(&r)?);
            }
        }
        let energy = src.energy();
        if energy == 0.0 {
            return Ok(empty_factors(dims));
        }
        let ql = acc.reorthogonalize(&ql)?;
        let bl = src.apply_transpose(&ql)?.transpose();
        match acc.push(ql, bl, energy, cfg.eps)? {
            Step::Done => return acc.finish(),
            Step::Continue => {}
        }
    }
}

/// Range and co-range sketches accumulated by the Gram-based variant:
/// `Y = X * Ω` and `W = Xᵀ * Y`.
#[derive(Clone, Debug)]
pub struct GramSketch {
    pub y: Tensor3,
    pub w: Tensor3,
}

/// Eigenvalues at or below this fraction of a slice's largest one are
/// treated as zero when inverting a Gram tensor.
const GRAM_CUTOFF: f64 = 100.0 * f64::EPSILON;

/// Gram tensor of `[old, new]` given the Gram tensor `g` of `old`.
fn extend_gram(g: &FourierTensor, old: &FourierTensor, new: &FourierTensor) -> Result<FourierTensor> {
    let cross = old.adjoint_mul(new)?;
    let top = g.concat(&cross, Mode::Second)?;
    let bottom = cross.transpose().concat(&new.adjoint_mul(new)?, Mode::Second)?;
    top.concat(&bottom, Mode::First)
}

/// Clamped per-slice pseudo-inverse of a Hermitian positive semidefinite
/// spectrum.
fn gram_pinv(z: &FourierTensor) -> Result<FourierTensor> {
    let (v, d) = feigh(z);
    let inv: Vec<Vec<f64>> = d
        .iter()
        .map(|vals| {
            let top = vals.last().copied().unwrap_or(0.0);
            vals.iter()
                .map(|&l| if l > GRAM_CUTOFF * top && l > 0.0 { 1.0 / l } else { 0.0 })
                .collect()
        })
        .collect();
    scale_columns(&v, &inv).mul_adjoint(&v)
}

/// `(1/I3) Σ_f w_f Re tr(T̂_f Ẑ⁺_f)`, the first-slice trace of `T * Z⁺`.
fn trace_product(t: &FourierTensor, zinv: &FourierTensor) -> f64 {
    let n3 = t.depth();
    let total: f64 = t
        .slices()
        .iter()
        .zip(zinv.slices())
        .enumerate()
        .map(|(f, (a, b))| {
            // tr(A B) = Σ_ij A_ij B_ji
            let mut s = 0.0;
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    s += (a[(i, j)] * b[(j, i)]).re;
                }
            }
            slice_weight(f, n3) * s
        })
        .sum();
    total / n3 as f64
}

/// Gram-based blocked QB. The residual is tracked through
/// `‖X‖² − tr((Wᵀ*W * (Yᵀ*Y)⁻¹)₁)` and the factors come from a T-EIG of
/// `Yᵀ*Y` at the end; orthonormalization only happens inside the power
/// iterations.
pub fn alg11_fixed_precision(x: &Tensor3, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    Ok(alg11_counted(&CountedTensor::new(x), cfg)?.0)
}

/// Like [`alg11_fixed_precision`] but also returns the sketches `Y`, `W`.
pub fn alg11_with_sketch(x: &Tensor3, cfg: &FixedPrecisionConfig) -> Result<(QbFactors, GramSketch)> {
    alg11_counted(&CountedTensor::new(x), cfg)
}

pub fn alg11_counted(src: &CountedTensor, cfg: &FixedPrecisionConfig) -> Result<(QbFactors, GramSketch)> {
    let dims = src.dims();
    let (n1, n2, n3) = dims;
    let cap = cfg.cap(dims)?;
    let full_rank = n1.min(n2);
    let mut rng = rng_from_seed(cfg.seed);
    let mut y = FourierTensor::zeros((n1, 0, n3));
    let mut w = FourierTensor::zeros((n2, 0, n3));
    let mut z = FourierTensor::zeros((0, 0, n3));
    let mut t = FourierTensor::zeros((0, 0, n3));
    let mut zinv: Option<FourierTensor> = None;
    let mut trace = Vec::new();
    loop {
        let b = cfg.block.min(cap - y.cols());
        let mut omega = gaussian(&mut rng, (n2, b, n3));
        for _ in 0..cfg.q {
            let mut wi = src.apply_transpose(&src.apply(&omega)?)?;
            if let Some(zi) = &zinv {
                wi = wi.sub(&w.mul(&zi.mul(&w.adjoint_mul(&omega)?)?)?)?;
            }
            omega = forth(&wi);
        }
        let yi = src.apply(&omega)?;
        let energy = src.energy();
        if energy == 0.0 {
            let e = empty_factors(dims);
            let sketch = GramSketch {
                y: Tensor3::zeros((n1, 0, n3)),
                w: Tensor3::zeros((n2, 0, n3)),
            };
            return Ok((e, sketch));
        }
        let wi = src.apply_transpose(&yi)?;
        z = extend_gram(&z, &y, &yi)?;
        t = extend_gram(&t, &w, &wi)?;
        y = y.concat(&yi, Mode::Second)?;
        w = w.concat(&wi, Mode::Second)?;
        let zi = gram_pinv(&z)?;
        let remaining = energy - trace_product(&t, &zi);
        trace.push(remaining);
        zinv = Some(zi);

        let k = y.cols();
        let tol2 = cfg.eps * cfg.eps * energy;
        if remaining < tol2 || k >= full_rank || omega.cols() == 0 {
            break;
        }
        if k >= cap {
            let partial = gram_finalize(&y, &w, &z, trace.clone())?;
            return Err(TubalError::RankCapExceeded {
                max_rank: cap,
                residual: remaining.max(0.0).sqrt(),
                factors: Box::new(partial),
            });
        }
    }
    let factors = gram_finalize(&y, &w, &z, trace)?;
    let sketch = GramSketch {
        y: y.to_spatial()?,
        w: w.to_spatial()?,
    };
    Ok((factors, sketch))
}

/// `Q = Y V D^{-1/2}`, `B = (W V D^{-1/2})ᵀ` from the T-EIG `Yᵀ*Y = V D Vᵀ`.
///
/// The `d` smallest eigenpairs are dropped in every slice, where `d` is the
/// largest count of negligible eigenvalues over the slices that carry any
/// energy. Slices with no energy at all get an arbitrary orthonormal `Q`
/// slice and a zero `B` slice.
fn gram_finalize(y: &FourierTensor, w: &FourierTensor, z: &FourierTensor, trace: Vec<f64>) -> Result<QbFactors> {
    let (v, d) = feigh(z);
    let k = z.rows();
    let global = d.iter().filter_map(|s| s.last().copied()).fold(0.0, f64::max);
    let live = |vals: &[f64]| vals.last().copied().unwrap_or(0.0) > GRAM_CUTOFF * global;
    let drop = d
        .iter()
        .filter(|vals| live(vals))
        .map(|vals| {
            let top = vals[k - 1];
            vals.iter().filter(|&&l| l <= GRAM_CUTOFF * top).count()
        })
        .max()
        .unwrap_or(k);
    let keep = k - drop;
    let (n1, n2, n3) = (y.rows(), w.rows(), y.depth());

    let mut qs = Vec::with_capacity(d.len());
    let mut bs = Vec::with_capacity(d.len());
    for (f, vals) in d.iter().enumerate() {
        if !live(vals) {
            let basis = CMat::identity(n1, keep);
            qs.push(basis);
            bs.push(CMat::zeros(keep, n2));
            continue;
        }
        // largest eigenvalues first
        let cols: Vec<usize> = (drop..k).rev().collect();
        let vf = v.slice(f).select_columns(&cols);
        let scale: Vec<f64> = cols.iter().map(|&j| 1.0 / vals[j].sqrt()).collect();
        let mut vs = vf;
        for (j, &s) in scale.iter().enumerate() {
            for z in vs.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        qs.push(cmul(y.slice(f), &vs));
        bs.push(cmul(w.slice(f), &vs).adjoint());
    }
    let q = FourierTensor::from_slices_unchecked(n3, qs);
    let b = FourierTensor::from_slices_unchecked(n3, bs);
    Ok(QbFactors {
        q: q.to_spatial()?,
        b: b.to_spatial()?,
        energy_trace: trace,
    })
}

/// `‖X‖² − tr((Wᵀ*W * (Yᵀ*Y)⁻¹)₁)`: the squared residual of the QB
/// approximation whose basis spans `Y`, computed from sketches alone.
pub fn residual_estimate(y: &Tensor3, w: &Tensor3, norm_x2: f64) -> Result<f64> {
    crate::error::check_dims(
        "residual_estimate",
        y.dims(),
        w.dims(),
        y.cols() == w.cols() && y.depth() == w.depth(),
    )?;
    let yf = fft_mode3(y);
    let wf = fft_mode3(w);
    let z = yf.adjoint_mul(&yf)?;
    let (v, d) = feigh(&z);
    for (f, vals) in d.iter().enumerate() {
        let (lo, hi) = (vals.first().copied(), vals.last().copied());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo <= GRAM_CUTOFF * hi {
                return Err(TubalError::IllConditionedGram {
                    slice: f,
                    ratio: if hi > 0.0 { lo / hi } else { 0.0 },
                });
            }
        }
    }
    let inv: Vec<Vec<f64>> = d.iter().map(|vals| vals.iter().map(|l| 1.0 / l).collect()).collect();
    let zinv = scale_columns(&v, &inv).mul_adjoint(&v)?;
    let t = wf.adjoint_mul(&wf)?;
    Ok(norm_x2 - trace_product(&t, &zinv))
}

/// T-SVD of `Q * B` truncated at the smallest rank whose discarded tail
/// energy is at most `eps²` (absolute).
pub fn truncate_qb(f: &QbFactors, eps: f64) -> Result<TsvdFactors> {
    let (n1, n2, n3) = (f.q.rows(), f.b.cols(), f.q.depth());
    let svd = fsvd(&fft_mode3(&f.b));
    let k = svd.rank();
    let budget = eps * eps;
    let r = (0..=k).find(|&r| svd.tail_energy(r) <= budget).unwrap_or(k);
    if r == 0 {
        return Ok(TsvdFactors::empty(n1, n2, n3));
    }
    let top = svd.truncate(r);
    let u = fft_mode3(&f.q).mul(&top.u)?;
    Ok(TsvdFactors {
        u: u.to_spatial()?,
        s: top.s_tensor().to_spatial()?,
        v: top.v.to_spatial()?,
    })
}

#[cfg(test)]
mod tests;
