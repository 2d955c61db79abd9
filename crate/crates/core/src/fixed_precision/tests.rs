use super::*;
use crate::linalg::t_inv;
use crate::testutil::{gauss, lowrank, orth_defect, prod, rel};

type Runner = fn(&CountedTensor, &FixedPrecisionConfig) -> Result<QbFactors>;

fn alg11_plain(src: &CountedTensor, cfg: &FixedPrecisionConfig) -> Result<QbFactors> {
    alg11_counted(src, cfg).map(|(f, _)| f)
}

fn noisy(n: usize, n3: usize, r: usize, level: f64, seed: u64) -> Tensor3 {
    let clean = lowrank(n, n, n3, r, seed);
    let noise = gauss(n, n, n3, seed + 99);
    let scale = level * clean.fro_norm() / noise.fro_norm();
    clean.add(&noise.scale(scale)).unwrap()
}

#[test]
fn zero_tensor_stops_at_rank_zero() {
    let x = Tensor3::zeros((12, 10, 4));
    let cfg = FixedPrecisionConfig::new(1e-6, 3, 1, 0);
    for run in [alg9_counted as Runner, alg11_plain] {
        let f = run(&CountedTensor::new(&x), &cfg).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.reconstruct().unwrap(), x);
    }
    let f = alg10_counted(&CountedTensor::new(&x), &FixedPrecisionConfig::new(1e-6, 3, 4, 0)).unwrap();
    assert_eq!(f.rank(), 0);
}

#[test]
fn exact_rank_found_in_one_block() {
    let x = lowrank(40, 40, 8, 5, 11);
    let cases: [(Runner, usize, usize); 4] = [
        (alg9_counted, 1, 4),
        (|s, c| alg10_counted(s, c), 3, 3),
        (|s, c| alg10_counted(s, c), 4, 4),
        (alg11_plain, 1, 4),
    ];
    for (run, q, passes) in cases {
        let src = CountedTensor::new(&x);
        let f = run(&src, &FixedPrecisionConfig::new(1e-6, 5, q, 7)).unwrap();
        assert_eq!(f.rank(), 5);
        assert_eq!(f.energy_trace.len(), 1);
        assert_eq!(src.passes(), passes);
        assert!(rel(&f.reconstruct().unwrap(), &x) < 1e-6);
        assert!(orth_defect(&f.q) < 1e-9);
    }
}

#[test]
fn tolerance_met_on_noisy_data() {
    let x = noisy(30, 5, 6, 1e-2, 3);
    let eps = 5e-3;
    for (run, q) in [
        (alg9_counted as Runner, 1),
        (|s: &CountedTensor, c: &FixedPrecisionConfig| alg10_counted(s, c), 4),
        (alg11_plain, 1),
    ] {
        let f = run(&CountedTensor::new(&x), &FixedPrecisionConfig::new(eps, 4, q, 5)).unwrap();
        let err = rel(&f.reconstruct().unwrap(), &x);
        assert!(err <= eps * (1.0 + 1e-6), "error {err}");
        assert!(f.rank() < 30);
        assert!(orth_defect(&f.q) < 1e-9);
        assert!(f.energy_trace.windows(2).all(|w| w[1] <= w[0]));
        let last = *f.energy_trace.last().unwrap();
        let actual = x.sub(&f.reconstruct().unwrap()).unwrap().fro_norm_sq();
        assert!((last - actual).abs() <= 1e-8 * x.fro_norm_sq());
    }
}

#[test]
fn pass_budget_per_block() {
    let x = gauss(20, 16, 3, 1);
    for q in [0, 1, 2] {
        let src = CountedTensor::new(&x);
        let f = alg9_counted(&src, &FixedPrecisionConfig::new(1e-12, 4, q, 2)).unwrap();
        let blocks = f.energy_trace.len();
        assert_eq!(f.rank(), 16);
        assert_eq!(src.passes(), blocks * (2 * q + 2));
    }
    for q in [3, 4, 5, 6] {
        let src = CountedTensor::new(&x);
        let f = alg10_counted(&src, &FixedPrecisionConfig::new(1e-12, 4, q, 2)).unwrap();
        assert_eq!(src.passes(), f.energy_trace.len() * q, "q = {q}");
    }
    let src = CountedTensor::new(&x);
    let f = alg11_plain(&src, &FixedPrecisionConfig::new(1e-12, 4, 2, 2)).unwrap();
    assert_eq!(src.passes(), f.energy_trace.len() * 6);
}

#[test]
fn full_rank_counts_as_converged() {
    let x = gauss(12, 9, 4, 8);
    let f = alg9_fixed_precision(&x, &FixedPrecisionConfig::new(1e-14, 4, 1, 0)).unwrap();
    assert_eq!(f.rank(), 9);
    assert!(rel(&f.reconstruct().unwrap(), &x) < 1e-12);
}

#[test]
fn rank_cap_reports_partial_factors() {
    let x = gauss(20, 20, 3, 4);
    let cfg = FixedPrecisionConfig::new(1e-8, 3, 1, 0).with_max_rank(6);
    for run in [alg9_counted as Runner, alg11_plain] {
        match run(&CountedTensor::new(&x), &cfg) {
            Err(TubalError::RankCapExceeded {
                max_rank,
                residual,
                factors,
            }) => {
                assert_eq!(max_rank, 6);
                assert_eq!(factors.rank(), 6);
                assert!(residual > 1e-8 * x.fro_norm());
            }
            other => panic!("expected rank cap, got {other:?}"),
        }
    }
}

#[test]
fn invalid_configurations() {
    let x = gauss(6, 5, 2, 0);
    let bad = [
        FixedPrecisionConfig::new(0.0, 2, 1, 0),
        FixedPrecisionConfig::new(-1.0, 2, 1, 0),
        FixedPrecisionConfig::new(1e-3, 0, 1, 0),
        FixedPrecisionConfig::new(1e-3, 2, 1, 0).with_max_rank(6),
        FixedPrecisionConfig::new(1e-3, 2, 1, 0).with_max_rank(0),
    ];
    for cfg in bad {
        assert!(matches!(
            alg9_fixed_precision(&x, &cfg),
            Err(TubalError::InvalidParameter(_))
        ));
    }
    for q in [0, 1, 2] {
        let cfg = FixedPrecisionConfig::new(1e-3, 2, q, 0);
        assert!(matches!(
            alg10_fixed_precision(&x, &cfg),
            Err(TubalError::InvalidParameter(_))
        ));
    }
}

#[test]
fn gram_factors_match_projection_formula() {
    let x = noisy(24, 4, 8, 1e-3, 9);
    let cfg = FixedPrecisionConfig::new(0.05, 8, 1, 1);
    let (f, sketch) = alg11_with_sketch(&x, &cfg).unwrap();
    assert!(f.rank() >= 8);
    let z = prod(&sketch.y.transpose(), &sketch.y);
    let direct = prod(&prod(&sketch.y, &t_inv(&z).unwrap()), &sketch.w.transpose());
    let qb = f.reconstruct().unwrap();
    assert!(rel(&qb, &direct) < 1e-8);
}

#[test]
fn residual_estimate_matches_explicit() {
    let x = gauss(15, 12, 3, 2);
    let omega = gauss(12, 5, 3, 3);
    let y = prod(&x, &omega);
    let w = prod(&x.transpose(), &y);
    let est = residual_estimate(&y, &w, x.fro_norm_sq()).unwrap();
    let q = crate::linalg::orth(&y).unwrap();
    let explicit = x.sub(&prod(&q, &prod(&q.transpose(), &x))).unwrap().fro_norm_sq();
    assert!((est - explicit).abs() <= 1e-9 * explicit);

    let zero_w = Tensor3::zeros(w.dims());
    assert_eq!(residual_estimate(&y, &zero_w, 4.5).unwrap(), 4.5);

    let square = gauss(12, 12, 3, 4);
    let x = gauss(12, 10, 3, 5);
    let y = square.clone();
    let w = prod(&x.transpose(), &y);
    let full = residual_estimate(&y, &w, x.fro_norm_sq()).unwrap();
    assert!(full.abs() < 1e-8 * x.fro_norm_sq());
}

#[test]
fn residual_estimate_rejects_dependent_columns() {
    let a = gauss(10, 1, 2, 0);
    let y = Tensor3::concat(&a, &a, Mode::Second).unwrap();
    let w = Tensor3::zeros((6, 2, 2));
    assert!(matches!(
        residual_estimate(&y, &w, 1.0),
        Err(TubalError::IllConditionedGram { .. })
    ));
}

#[test]
fn truncation_recovers_low_rank() {
    let x = noisy(30, 4, 5, 1e-4, 6);
    let f = alg9_fixed_precision(&x, &FixedPrecisionConfig::new(1e-8, 6, 1, 0)).unwrap();
    let loose = truncate_qb(&f, 1e-2 * x.fro_norm()).unwrap();
    assert_eq!(loose.rank(), 5);
    let tight = truncate_qb(&f, 0.0).unwrap();
    assert_eq!(tight.rank(), f.rank());
    assert!(rel(&tight.reconstruct().unwrap(), &f.reconstruct().unwrap()) < 1e-10);
    let none = truncate_qb(&f, 2.0 * x.fro_norm()).unwrap();
    assert_eq!(none.rank(), 0);

    let eps = 3e-5 * x.fro_norm();
    let t = truncate_qb(&f, eps).unwrap();
    let gap = f.reconstruct().unwrap().sub(&t.reconstruct().unwrap()).unwrap();
    assert!(gap.fro_norm() <= eps * (1.0 + 1e-9));
}
