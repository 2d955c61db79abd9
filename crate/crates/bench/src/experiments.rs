//! Experiment grids: fixed-precision accuracy on noisy low-rank data,
//! one-pass stability on the same data, and one-pass accuracy on smooth
//! closed-form tensors.

use std::collections::BTreeMap;

use tubal::fixed_precision::truncate_qb;

use crate::record::RunRecord;
use crate::runner::{record, run, Algorithm, RunParams};
use crate::synth::{gen_case, gen_lowrank_sample, SyntheticKind, SyntheticSpec};
use crate::BenchError;

/// Tubal rank of the clean part of the noisy test tensors.
pub const TRUE_RANK: usize = 50;
/// Noise level of the noisy test tensors.
pub const DELTA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    FixedPrecision,
    Stability,
    SmoothCases,
}

impl Table {
    pub fn from_id(id: u32) -> Result<Self, BenchError> {
        match id {
            1 => Ok(Self::FixedPrecision),
            2 => Ok(Self::Stability),
            3 => Ok(Self::SmoothCases),
            _ => Err(BenchError::Usage(format!("table must be 1, 2 or 3, got {id}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub table: Table,
    /// Cube sizes; `None` uses the table default.
    pub sizes: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    /// Smaller default sizes and blocks.
    pub desk: bool,
}

impl BenchConfig {
    pub fn sizes(&self) -> Vec<usize> {
        if let Some(s) = &self.sizes {
            return s.clone();
        }
        match (self.table, self.desk) {
            (Table::FixedPrecision, false) => vec![200, 300, 400, 500],
            (Table::FixedPrecision, true) => vec![100, 150, 200],
            (_, false) => vec![300],
            (_, true) => vec![150],
        }
    }

    pub fn block(&self) -> usize {
        if self.desk {
            25
        } else {
            100
        }
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<RunRecord>, BenchError> {
    if cfg.trials == 0 {
        return Err(BenchError::Usage("trials must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for n in cfg.sizes() {
        for t in 0..cfg.trials as u64 {
            let seed = cfg.seed.wrapping_add(t);
            let batch = match cfg.table {
                Table::FixedPrecision => fixed_precision_runs(n, cfg.block(), seed)?,
                Table::Stability => stability_runs(n, seed)?,
                Table::SmoothCases => smooth_case_runs(n, seed)?,
            };
            rows.extend(batch);
        }
    }
    Ok(rows)
}

/// Settings for the fixed-precision grid: relative bound `1e-5`, one power
/// iteration for 9 and 11, four passes per block for 10.
pub fn fixed_precision_params(alg: Algorithm, block: usize, seed: u64) -> RunParams {
    RunParams {
        eps: 1e-5,
        block,
        q: if alg == Algorithm::Alg10 { 4 } else { 1 },
        seed,
        ..RunParams::default()
    }
}

/// Runs 9, 10 and 11 on a noisy rank-50 tensor. `est_rank` is the rank kept
/// after trimming the factors at twice the noise norm; the truncated T-SVD
/// baseline uses the rank estimated by 9.
pub fn fixed_precision_runs(n: usize, block: usize, seed: u64) -> Result<Vec<RunRecord>, BenchError> {
    let sample = gen_lowrank_sample(&SyntheticSpec::lowrank(n, TRUE_RANK, DELTA, seed))?;
    let x = &sample.noisy;
    let trim = 2.0 * DELTA * sample.clean.fro_norm();
    let mut rows = Vec::new();
    let mut baseline_rank = TRUE_RANK;
    for alg in Algorithm::FIXED_PRECISION {
        let p = fixed_precision_params(alg, block, seed);
        let out = run(x, alg, &p)?;
        let mut rec = record(x, &out, &p)?;
        let qb = out.qb.as_ref().expect("fixed-precision runs return QB factors");
        rec.est_rank = truncate_qb(qb, trim)?.rank();
        if alg == Algorithm::Alg9 {
            baseline_rank = rec.est_rank.max(1);
        }
        rows.push(rec);
    }
    let p = RunParams {
        rank: baseline_rank,
        seed,
        ..RunParams::default()
    };
    rows.push(record(x, &run(x, Algorithm::Tsvd, &p)?, &p)?);
    Ok(rows)
}

/// Sketch sizes for the one-pass grids: `L = K = 40` for the cross and QB
/// approximations, `L = K = 50`, `H = 45`, `R = 40` for the others.
pub fn single_pass_params(alg: Algorithm, seed: u64) -> RunParams {
    let base = RunParams {
        l: 50,
        k: 50,
        h: 45,
        rank: 40,
        seed,
        ..RunParams::default()
    };
    match alg {
        Algorithm::Alg4 | Algorithm::Alg5 => RunParams { l: 40, k: 40, ..base },
        _ => base,
    }
}

fn single_pass_runs(x: &tubal::Tensor3, label: &str, seed: u64) -> Result<Vec<RunRecord>, BenchError> {
    let mut rows = Vec::new();
    for alg in Algorithm::SINGLE_PASS {
        let p = single_pass_params(alg, seed);
        let mut rec = record(x, &run(x, alg, &p)?, &p)?;
        if !label.is_empty() {
            rec.algorithm = format!("{}/{label}", rec.algorithm);
        }
        rows.push(rec);
    }
    Ok(rows)
}

/// 4 through 8 on a fresh noisy rank-50 tensor.
pub fn stability_runs(n: usize, seed: u64) -> Result<Vec<RunRecord>, BenchError> {
    let x = gen_lowrank_sample(&SyntheticSpec::lowrank(n, TRUE_RANK, DELTA, seed))?.noisy;
    single_pass_runs(&x, "", seed)
}

/// 4 through 8 on each closed-form case; rows are labelled `algN/caseM`.
pub fn smooth_case_runs(n: usize, seed: u64) -> Result<Vec<RunRecord>, BenchError> {
    let mut rows = Vec::new();
    for kind in [SyntheticKind::Case1, SyntheticKind::Case2, SyntheticKind::Case3] {
        let x = gen_case(&SyntheticSpec::case(kind, n))?;
        rows.extend(single_pass_runs(&x, kind.label(), seed)?);
    }
    Ok(rows)
}

/// Median relative error per algorithm label.
pub fn median_errors(rows: &[RunRecord]) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.algorithm.clone()).or_default().push(r.rel_err);
    }
    groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            let med = if v.len() % 2 == 1 {
                v[m]
            } else {
                0.5 * (v[m - 1] + v[m])
            };
            (k, med)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_ids() {
        assert_eq!(Table::from_id(2).unwrap(), Table::Stability);
        assert!(Table::from_id(9).is_err());
        assert!(Table::from_id(0).is_err());
    }

    #[test]
    fn default_sizes() {
        let mut cfg = BenchConfig {
            table: Table::FixedPrecision,
            sizes: None,
            trials: 1,
            seed: 0,
            desk: true,
        };
        assert_eq!(cfg.sizes(), vec![100, 150, 200]);
        assert_eq!(cfg.block(), 25);
        cfg.desk = false;
        assert_eq!(cfg.sizes(), vec![200, 300, 400, 500]);
        cfg.table = Table::SmoothCases;
        assert_eq!(cfg.sizes(), vec![300]);
        cfg.sizes = Some(vec![60]);
        assert_eq!(cfg.sizes(), vec![60]);
        cfg.trials = 0;
        assert!(run_bench(&cfg).is_err());
    }

    #[test]
    fn medians() {
        let mut rows = Vec::new();
        for (alg, e) in [("a", 3.0), ("a", 1.0), ("a", 2.0), ("b", 1.0), ("b", 4.0)] {
            let mut r = RunRecord::new(alg, 1, 0);
            r.rel_err = e;
            rows.push(r);
        }
        let m = median_errors(&rows);
        assert_eq!(m["a"], 2.0);
        assert_eq!(m["b"], 2.5);
    }
}
