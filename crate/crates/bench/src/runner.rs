//! Uniform front end over every approximation algorithm.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use tubal::counted::CountedTensor;
use tubal::fixed_precision::{alg10_counted, alg11_counted, alg9_counted, FixedPrecisionConfig, QbFactors};
use tubal::linalg::t_svd_truncated;
use tubal::metrics::rel_err;
use tubal::single_pass::{alg4_tcur_counted, alg5_qb_counted, run_counted, SinglePassAlg, SketchParams};
use tubal::Tensor3;

use crate::record::RunRecord;
use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Tsvd,
    Alg4,
    Alg5,
    Alg6,
    Alg7,
    Alg8,
    Alg9,
    Alg10,
    Alg11,
}

impl Algorithm {
    pub const SINGLE_PASS: [Algorithm; 5] = [Self::Alg4, Self::Alg5, Self::Alg6, Self::Alg7, Self::Alg8];
    pub const FIXED_PRECISION: [Algorithm; 3] = [Self::Alg9, Self::Alg10, Self::Alg11];

    pub fn id(self) -> &'static str {
        match self {
            Self::Tsvd => "tsvd",
            Self::Alg4 => "alg4",
            Self::Alg5 => "alg5",
            Self::Alg6 => "alg6",
            Self::Alg7 => "alg7",
            Self::Alg8 => "alg8",
            Self::Alg9 => "alg9",
            Self::Alg10 => "alg10",
            Self::Alg11 => "alg11",
        }
    }

    pub fn is_fixed_precision(self) -> bool {
        Self::FIXED_PRECISION.contains(&self)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        let key = key.strip_prefix("alg").unwrap_or(&key);
        Ok(match key {
            "tsvd" => Self::Tsvd,
            "4" => Self::Alg4,
            "5" => Self::Alg5,
            "6" => Self::Alg6,
            "7" => Self::Alg7,
            "8" => Self::Alg8,
            "9" => Self::Alg9,
            "10" => Self::Alg10,
            "11" => Self::Alg11,
            _ => return Err(BenchError::Usage(format!("unknown algorithm '{s}'"))),
        })
    }
}

/// Every knob any algorithm reads; each one ignores what it does not use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub l: usize,
    pub k: usize,
    pub h: usize,
    pub rank: usize,
    pub eps: f64,
    pub block: usize,
    /// Power iterations for 9 and 11, pass budget for 10.
    pub q: usize,
    pub max_rank: Option<usize>,
    pub seed: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            l: 50,
            k: 50,
            h: 45,
            rank: 40,
            eps: 1e-5,
            block: 25,
            q: 1,
            max_rank: None,
            seed: 0,
        }
    }
}

impl RunParams {
    fn sketch(&self) -> SketchParams {
        SketchParams::new(self.l, self.k, self.h, self.rank, self.seed)
    }

    fn fixed(&self) -> FixedPrecisionConfig {
        FixedPrecisionConfig {
            eps: self.eps,
            block: self.block,
            q: self.q,
            max_rank: self.max_rank,
            seed: self.seed,
        }
    }
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub approx: Tensor3,
    /// Named factor tensors, in product order.
    pub factors: Vec<(&'static str, Tensor3)>,
    pub qb: Option<QbFactors>,
    pub rank: usize,
    pub pass_count: Option<usize>,
    pub time_s: f64,
}

/// Runs `alg` on `x`. The timer covers the algorithm, not the
/// reconstruction of the approximation.
pub fn run(x: &Tensor3, alg: Algorithm, p: &RunParams) -> Result<Outcome, BenchError> {
    let src = CountedTensor::new(x);
    let start = Instant::now();
    let mut qb = None;
    let (factors, rank): (Vec<(&'static str, Tensor3)>, usize) = match alg {
        Algorithm::Tsvd => {
            let f = t_svd_truncated(x, p.rank)?;
            let r = f.rank();
            (vec![("U", f.u), ("S", f.s), ("V", f.v)], r)
        }
        Algorithm::Alg4 => {
            let f = alg4_tcur_counted(&src, p.l, p.k, p.seed)?;
            let r = f.u.rows();
            (vec![("C", f.c), ("U", f.u), ("R", f.r)], r)
        }
        Algorithm::Alg5 => {
            let f = alg5_qb_counted(&src, p.l, p.k, p.seed)?;
            let r = f.rank();
            (vec![("Q", f.q), ("B", f.b)], r)
        }
        Algorithm::Alg6 | Algorithm::Alg7 | Algorithm::Alg8 => {
            let which = match alg {
                Algorithm::Alg6 => SinglePassAlg::Alg6,
                Algorithm::Alg7 => SinglePassAlg::Alg7,
                _ => SinglePassAlg::Alg8,
            };
            let f = run_counted(&src, &p.sketch(), which)?;
            let r = f.rank();
            (vec![("U", f.u), ("S", f.s), ("V", f.v)], r)
        }
        Algorithm::Alg9 | Algorithm::Alg10 | Algorithm::Alg11 => {
            let cfg = p.fixed();
            let f = match alg {
                Algorithm::Alg9 => alg9_counted(&src, &cfg)?,
                Algorithm::Alg10 => alg10_counted(&src, &cfg)?,
                _ => alg11_counted(&src, &cfg)?.0,
            };
            let r = f.rank();
            let named = vec![("Q", f.q.clone()), ("B", f.b.clone())];
            qb = Some(f);
            (named, r)
        }
    };
    let time_s = start.elapsed().as_secs_f64();
    let approx = reconstruct(&factors)?;
    let pass_count = (alg != Algorithm::Tsvd).then(|| src.passes());
    Ok(Outcome {
        algorithm: alg,
        approx,
        factors,
        qb,
        rank,
        pass_count,
        time_s,
    })
}

fn reconstruct(factors: &[(&'static str, Tensor3)]) -> Result<Tensor3, BenchError> {
    let mut it = factors.iter();
    let (_, first) = it.next().expect("at least one factor");
    let mut acc = first.clone();
    for (name, f) in it {
        // the right singular factor enters transposed
        let rhs = if *name == "V" { f.transpose() } else { f.clone() };
        acc = tubal::t_product(&acc, &rhs)?;
    }
    Ok(acc)
}

/// Builds the CSV row for a finished run; only the parameters the algorithm
/// reads are filled in.
pub fn record(x: &Tensor3, out: &Outcome, p: &RunParams) -> Result<RunRecord, BenchError> {
    let mut r = RunRecord::new(out.algorithm.id(), x.rows(), p.seed);
    match out.algorithm {
        Algorithm::Tsvd => r.rank = Some(p.rank),
        Algorithm::Alg4 | Algorithm::Alg5 => {
            r.l = Some(p.l);
            r.k = Some(p.k);
        }
        Algorithm::Alg6 | Algorithm::Alg7 | Algorithm::Alg8 => {
            r.l = Some(p.l);
            r.k = Some(p.k);
            r.h = Some(p.h);
            r.rank = Some(p.rank);
        }
        Algorithm::Alg9 | Algorithm::Alg10 | Algorithm::Alg11 => {
            r.eps = Some(p.eps);
            r.block = Some(p.block);
            r.passes = Some(p.q);
        }
    }
    r.time_s = out.time_s;
    r.rel_err = rel_err(x, &out.approx)?;
    r.est_rank = out.rank;
    r.pass_count = out.pass_count;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SyntheticSpec};

    #[test]
    fn every_algorithm_recovers_exact_rank() {
        let x = generate(&SyntheticSpec::lowrank(24, 4, 0.0, 1)).unwrap();
        let p = RunParams {
            l: 10,
            k: 8,
            h: 6,
            rank: 4,
            eps: 1e-9,
            block: 4,
            q: 4,
            ..RunParams::default()
        };
        for alg in [
            Algorithm::Tsvd,
            Algorithm::Alg4,
            Algorithm::Alg5,
            Algorithm::Alg6,
            Algorithm::Alg7,
            Algorithm::Alg8,
            Algorithm::Alg9,
            Algorithm::Alg10,
            Algorithm::Alg11,
        ] {
            let out = run(&x, alg, &p).unwrap();
            let rec = record(&x, &out, &p).unwrap();
            assert!(rec.rel_err < 1e-8, "{alg}: {}", rec.rel_err);
            assert_eq!(rec.algorithm, alg.id());
            assert_eq!(alg.id().parse::<Algorithm>().unwrap(), alg);
        }
    }

    #[test]
    fn records_fill_relevant_fields() {
        let x = generate(&SyntheticSpec::lowrank(12, 2, 0.0, 1)).unwrap();
        let p = RunParams {
            l: 6,
            k: 4,
            h: 3,
            rank: 2,
            block: 2,
            q: 3,
            ..RunParams::default()
        };
        let rec = record(&x, &run(&x, Algorithm::Alg10, &p).unwrap(), &p).unwrap();
        assert_eq!((rec.block, rec.passes, rec.l), (Some(2), Some(3), None));
        assert_eq!(rec.pass_count, Some(3));
        let rec = record(&x, &run(&x, Algorithm::Alg7, &p).unwrap(), &p).unwrap();
        assert_eq!(
            (rec.h, rec.rank, rec.eps, rec.pass_count),
            (Some(3), Some(2), None, Some(1))
        );
        assert!("alg12".parse::<Algorithm>().is_err());
        assert_eq!("7".parse::<Algorithm>().unwrap(), Algorithm::Alg7);
    }
}
