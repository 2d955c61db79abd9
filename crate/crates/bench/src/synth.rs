//! Synthetic test tensors: noisy low tubal rank products and three smooth
//! closed-form fields.

use std::str::FromStr;

use tubal::random::{gauss_from_rng, rng_from_seed, GaussKind};
use tubal::{t_product, Tensor3};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticKind {
    Lowrank,
    /// `1 / √(i² + j² + k²)`
    Case1,
    /// `1 / (i³ + j³ + k³)^{1/3}`
    Case2,
    /// `1 / (sin i + tanh(j + k))`
    Case3,
}

impl FromStr for SyntheticKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lowrank" => Ok(Self::Lowrank),
            "case1" | "i" => Ok(Self::Case1),
            "case2" | "ii" => Ok(Self::Case2),
            "case3" | "iii" => Ok(Self::Case3),
            other => Err(BenchError::Usage(format!("unknown tensor kind '{other}'"))),
        }
    }
}

impl SyntheticKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Lowrank => "lowrank",
            Self::Case1 => "case1",
            Self::Case2 => "case2",
            Self::Case3 => "case3",
        }
    }
}

/// A cubic `n × n × n` synthetic tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    /// Tubal rank of the clean product; ignored by the closed-form cases.
    pub rank: usize,
    /// Noise level relative to the clean tensor's norm.
    pub delta: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn lowrank(n: usize, rank: usize, delta: f64, seed: u64) -> Self {
        Self {
            kind: SyntheticKind::Lowrank,
            n,
            rank,
            delta,
            seed,
        }
    }

    pub fn case(kind: SyntheticKind, n: usize) -> Self {
        Self {
            kind,
            n,
            rank: 0,
            delta: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n < 2 {
            return Err(BenchError::Usage(format!("size must be at least 2, got {}", self.n)));
        }
        if self.kind == SyntheticKind::Lowrank {
            if self.rank == 0 || self.rank > self.n {
                return Err(BenchError::Usage(format!(
                    "rank must lie in 1..={}, got {}",
                    self.n, self.rank
                )));
            }
            if !(self.delta >= 0.0 && self.delta.is_finite()) {
                return Err(BenchError::Usage(format!(
                    "noise level must be >= 0, got {}",
                    self.delta
                )));
            }
        }
        Ok(())
    }
}

/// A noisy low-rank tensor together with its clean part.
#[derive(Clone, Debug)]
pub struct LowRankSample {
    pub clean: Tensor3,
    pub noisy: Tensor3,
}

/// `X = A * B + δ · (Y / ‖Y‖) · ‖A * B‖` with Gaussian `A` (`n × R × n`),
/// `B` (`R × n × n`) and `Y`, drawn in that order from one seeded stream.
pub fn gen_lowrank_sample(spec: &SyntheticSpec) -> Result<LowRankSample, BenchError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = rng_from_seed(spec.seed);
    let a = gauss_from_rng(&mut rng, (n, spec.rank, n), GaussKind::Full);
    let b = gauss_from_rng(&mut rng, (spec.rank, n, n), GaussKind::Full);
    let clean = t_product(&a, &b)?;
    if spec.delta == 0.0 {
        return Ok(LowRankSample {
            noisy: clean.clone(),
            clean,
        });
    }
    let y = gauss_from_rng(&mut rng, (n, n, n), GaussKind::Full);
    let scale = spec.delta * clean.fro_norm() / y.fro_norm();
    let noisy = clean.add(&y.scale(scale))?;
    Ok(LowRankSample { clean, noisy })
}

/// Entry formulas use one-based indices.
pub fn gen_case(spec: &SyntheticSpec) -> Result<Tensor3, BenchError> {
    spec.validate()?;
    let n = spec.n;
    let f: fn(f64, f64, f64) -> f64 = match spec.kind {
        SyntheticKind::Case1 => |i, j, k| 1.0 / (i * i + j * j + k * k).sqrt(),
        SyntheticKind::Case2 => |i, j, k| 1.0 / (i * i * i + j * j * j + k * k * k).cbrt(),
        SyntheticKind::Case3 => |i, j, k| 1.0 / (i.sin() + (j + k).tanh()),
        SyntheticKind::Lowrank => return Err(BenchError::Usage("low-rank tensors come from gen_lowrank".into())),
    };
    Ok(Tensor3::from_fn((n, n, n), |i, j, k| {
        f((i + 1) as f64, (j + 1) as f64, (k + 1) as f64)
    }))
}

pub fn generate(spec: &SyntheticSpec) -> Result<Tensor3, BenchError> {
    match spec.kind {
        SyntheticKind::Lowrank => Ok(gen_lowrank_sample(spec)?.noisy),
        _ => gen_case(spec),
    }
}
