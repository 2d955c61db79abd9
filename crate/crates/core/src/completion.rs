//! Low tubal rank completion of partially observed tensors.
//!
//! Missing entries are filled by alternating a low-rank projection with
//! re-imposing the known entries:
//! `X⁽ⁿ⁾ = 𝓛(C⁽ⁿ⁾)`, `C⁽ⁿ⁺¹⁾ = C⁽⁰⁾ + (1 − Ω) ⊛ X⁽ⁿ⁾`.

use crate::counted::CountedTensor;
use crate::error::{check_dims, Result, TubalError};
use crate::fixed_precision::{
    alg10_fixed_precision, alg11_fixed_precision, alg9_fixed_precision, FixedPrecisionConfig,
};
use crate::linalg::t_svd_truncated;
use crate::single_pass::{alg4_tcur, alg5_qb, run_counted, SinglePassAlg, SketchParams};
use crate::tensor::Tensor3;

/// Observed entries plus a binary mask marking which ones are known.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedTensor {
    data: Tensor3,
    mask: Tensor3,
}

impl MaskedTensor {
    /// Zeroes `data` wherever `mask` is 0. Mask entries must be 0 or 1.
    pub fn new(data: &Tensor3, mask: Tensor3) -> Result<Self> {
        check_dims("masked tensor", data.dims(), mask.dims(), data.dims() == mask.dims())?;
        if mask.as_slice().iter().any(|&m| m != 0.0 && m != 1.0) {
            return Err(TubalError::InvalidParameter("mask entries must be 0 or 1".into()));
        }
        let data = data.hadamard(&mask)?;
        Ok(Self { data, mask })
    }

    pub fn data(&self) -> &Tensor3 {
        &self.data
    }

    pub fn mask(&self) -> &Tensor3 {
        &self.mask
    }

    /// Fraction of known entries.
    pub fn density(&self) -> f64 {
        self.mask.as_slice().iter().sum::<f64>() / self.mask.len().max(1) as f64
    }
}

/// The low-rank map applied at every iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LowRankOperator {
    TruncatedSvd {
        rank: usize,
    },
    Cur {
        l: usize,
        k: usize,
    },
    Qb {
        l: usize,
        k: usize,
    },
    SinglePass {
        alg: SinglePassAlg,
        params: SketchParams,
    },
    /// `alg` is 9, 10 or 11.
    FixedPrecision {
        alg: u8,
        config: FixedPrecisionConfig,
    },
}

impl LowRankOperator {
    /// Applies the operator; randomized variants offset their seed by
    /// `iteration` so successive sketches are independent.
    pub fn apply(&self, x: &Tensor3, iteration: u64) -> Result<Tensor3> {
        match *self {
            Self::TruncatedSvd { rank } => t_svd_truncated(x, rank)?.reconstruct(),
            Self::Cur { l, k } => alg4_tcur(x, l, k, iteration)?.reconstruct(),
            Self::Qb { l, k } => alg5_qb(x, l, k, iteration)?.reconstruct(),
            Self::SinglePass { alg, params } => {
                let p = SketchParams {
                    seed: params.seed.wrapping_add(iteration),
                    ..params
                };
                run_counted(&CountedTensor::new(x), &p, alg)?.reconstruct()
            }
            Self::FixedPrecision { alg, config } => {
                let c = FixedPrecisionConfig {
                    seed: config.seed.wrapping_add(iteration),
                    ..config
                };
                let f = match alg {
                    9 => alg9_fixed_precision(x, &c)?,
                    10 => alg10_fixed_precision(x, &c)?,
                    11 => alg11_fixed_precision(x, &c)?,
                    other => {
                        return Err(TubalError::InvalidParameter(format!(
                            "no fixed-precision algorithm {other}"
                        )))
                    }
                };
                f.reconstruct()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionConfig {
    pub operator: LowRankOperator,
    pub max_iters: usize,
    /// Stop once `‖C⁽ⁿ⁺¹⁾ − C⁽ⁿ⁾‖ / ‖C⁽ⁿ⁾‖` falls to this value.
    pub tol: f64,
    /// Standard deviation of the final smoothing filter; 0 disables it.
    pub filter_sigma: f64,
    /// Also smooth every low-rank iterate before it fills the missing
    /// entries. Needed when whole rows and columns are unobserved, as on an
    /// upsampling grid, since a low-rank projection keeps those at zero.
    pub smooth_iterates: bool,
}

impl CompletionConfig {
    pub fn new(operator: LowRankOperator) -> Self {
        Self {
            operator,
            max_iters: 80,
            tol: 1e-4,
            filter_sigma: 0.5,
            smooth_iterates: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(TubalError::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) || !(self.filter_sigma >= 0.0) {
            return Err(TubalError::InvalidParameter(
                "tolerance and filter width must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    /// Final iterate; known entries equal the observations exactly.
    pub unfiltered: Tensor3,
    /// `unfiltered` after the smoothing filter (a copy when it is disabled).
    pub filtered: Tensor3,
    pub iterations: usize,
    /// Relative change at the last iteration.
    pub last_change: f64,
}

/// Runs the fill-in iteration to convergence or `max_iters`.
pub fn complete(m: &MaskedTensor, cfg: &CompletionConfig) -> Result<Completion> {
    cfg.validate()?;
    let known = m.data();
    let missing = m.mask().map(|v| 1.0 - v);
    let mut c = known.clone();
    let mut iterations = 0;
    let mut last_change = 0.0;
    for n in 0..cfg.max_iters {
        let mut x = cfg.operator.apply(&c, n as u64)?;
        if cfg.smooth_iterates && cfg.filter_sigma > 0.0 {
            x = gaussian_blur(&x, cfg.filter_sigma, BoundaryMode::Replicate);
        }
        let next = known.add(&missing.hadamard(&x)?)?;
        let base = c.fro_norm();
        let change = next.sub(&c)?.fro_norm();
        last_change = if base > 0.0 {
            change / base
        } else if change > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        c = next;
        iterations = n + 1;
        if last_change <= cfg.tol {
            break;
        }
    }
    let filtered = if cfg.filter_sigma > 0.0 {
        gaussian_blur(&c, cfg.filter_sigma, BoundaryMode::Replicate)
    } else {
        c.clone()
    };
    Ok(Completion {
        unfiltered: c,
        filtered,
        iterations,
        last_change,
    })
}

/// Spreads the pixels of `img` onto a grid `factor` times finer in the
/// first two modes: pixel `(i, j)` lands at `(factor·i, factor·j)`
/// (zero-based) and everything else is unknown.
pub fn upsample_mask(img: &Tensor3, factor: usize) -> Result<MaskedTensor> {
    if factor == 0 {
        return Err(TubalError::InvalidParameter(
            "upsampling factor must be at least 1".into(),
        ));
    }
    let (n1, n2, n3) = img.dims();
    let dims = (n1 * factor, n2 * factor, n3);
    let on_grid = |i: usize, j: usize| i.is_multiple_of(factor) && j.is_multiple_of(factor);
    let data = Tensor3::from_fn(dims, |i, j, k| {
        if on_grid(i, j) {
            img.get(i / factor, j / factor, k)
        } else {
            0.0
        }
    });
    let mask = Tensor3::from_fn(dims, |i, j, _| if on_grid(i, j) { 1.0 } else { 0.0 });
    MaskedTensor::new(&data, mask)
}

/// How the filter sees pixels beyond the image border.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Nearest edge pixel.
    #[default]
    Replicate,
    /// Mirror image about the edge (`d c b a | a b c d`). Preserves the
    /// total sum of the image.
    Symmetric,
}

/// Normalized 1-D Gaussian of half-width `⌈2σ⌉`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let half = (2.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-half..=half)
        .map(|t| (-(t * t) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn reflect(i: i64, n: i64, mode: BoundaryMode) -> usize {
    let r = match mode {
        BoundaryMode::Replicate => i.clamp(0, n - 1),
        BoundaryMode::Symmetric => {
            let period = 2 * n;
            let m = i.rem_euclid(period);
            if m < n {
                m
            } else {
                period - 1 - m
            }
        }
    };
    r as usize
}

/// Separable Gaussian smoothing of every frontal slice.
pub fn gaussian_blur(img: &Tensor3, sigma: f64, boundary: BoundaryMode) -> Tensor3 {
    let kernel = gaussian_kernel(sigma);
    if kernel.len() == 1 {
        return img.clone();
    }
    let half = (kernel.len() / 2) as i64;
    let (n1, n2, n3) = img.dims();
    let pass = |src: &Tensor3, along_rows: bool| {
        Tensor3::from_fn((n1, n2, n3), |i, j, k| {
            kernel
                .iter()
                .enumerate()
                .map(|(t, w)| {
                    let off = t as i64 - half;
                    if along_rows {
                        w * src.get(reflect(i as i64 + off, n1 as i64, boundary), j, k)
                    } else {
                        w * src.get(i, reflect(j as i64 + off, n2 as i64, boundary), k)
                    }
                })
                .sum()
        })
    };
    pass(&pass(img, true), false)
}
