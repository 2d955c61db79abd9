use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tubal::completion::{complete, upsample_mask, CompletionConfig, LowRankOperator};
use tubal::fixed_precision::FixedPrecisionConfig;
use tubal::io::{load_tt3d, save_tt3d};
use tubal::metrics::{psnr, rel_err};
use tubal::single_pass::{SinglePassAlg, SketchParams};
use tubal::{Tensor3, TubalError};
use tubal_bench::experiments::{median_errors, run_bench, BenchConfig, Table};
use tubal_bench::netpbm::{read_image, write_image, Image};
use tubal_bench::record::{append_records, RunRecord};
use tubal_bench::runner::{record, run, Algorithm, RunParams};
use tubal_bench::synth::{generate, SyntheticKind, SyntheticSpec};
use tubal_bench::BenchError;

/// Low tubal rank approximation of third-order tensors.
#[derive(Parser, Debug)]
#[command(name = "tubal", version, about)]
struct Cli {
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Main output file; each command has its own default
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Repetitions per grid point (bench) with consecutive seeds
    #[arg(long, global = true, default_value_t = 1)]
    trials: usize,
    /// Desk-scale sizes and block width for bench
    #[arg(long, global = true)]
    desk: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic tensor as TT3D. The low-rank kind adds Gaussian
    /// noise scaled to `delta` times the norm of the clean product.
    Gen {
        /// lowrank, case1, case2 or case3
        #[arg(long, default_value = "lowrank")]
        kind: SyntheticKind,
        /// Cube size
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        rank: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Approximate a TT3D tensor, save the factors and append a CSV row.
    Approx {
        #[arg(long)]
        input: PathBuf,
        /// tsvd or alg4 … alg11
        #[arg(long)]
        alg: Algorithm,
        #[command(flatten)]
        knobs: Knobs,
        /// Directory for the factor files
        #[arg(long, default_value = ".")]
        factors: PathBuf,
    },
    /// Regenerate one of the experiment grids as CSV.
    Bench {
        /// 1: fixed precision, 2: one-pass stability, 3: smooth cases
        #[arg(long)]
        table: u32,
        /// Cube sizes overriding the table default
        #[arg(long, value_delimiter = ',')]
        size: Vec<usize>,
    },
    /// Compress an 8-bit PGM/PPM image with a low-rank approximation.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "alg7")]
        alg: Algorithm,
        #[arg(long = "L", default_value_t = 350)]
        l: usize,
        #[arg(long = "K", default_value_t = 350)]
        k: usize,
        #[arg(long = "H", default_value_t = 100)]
        h: usize,
        #[arg(long, default_value_t = 30)]
        rank: usize,
        /// CSV file receiving the run record
        #[arg(long, default_value = "runs.csv")]
        csv: PathBuf,
    },
    /// Upsample an image onto a finer grid and fill in the missing pixels.
    Complete {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        factor: usize,
        /// tsvd or alg4 … alg11
        #[arg(long, default_value = "tsvd")]
        alg: Algorithm,
        #[arg(long, default_value_t = 60)]
        rank: usize,
        /// Sketch sizes; default `rank + 20`
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long = "H", default_value_t = 10)]
        h: usize,
        #[arg(long, default_value_t = 80)]
        iters: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Width of the final smoothing filter; 0 disables it
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        /// Smooth every low-rank iterate, not only the final image
        #[arg(long)]
        smooth_iterates: bool,
        /// Full-resolution image to score the result against
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "runs.csv")]
        csv: PathBuf,
    },
}

/// Algorithm parameters shared by `approx`.
#[derive(Args, Debug)]
struct Knobs {
    #[arg(long = "L", default_value_t = 50)]
    l: usize,
    #[arg(long = "K", default_value_t = 50)]
    k: usize,
    #[arg(long = "H", default_value_t = 45)]
    h: usize,
    /// Target tubal rank
    #[arg(long, default_value_t = 40)]
    rank: usize,
    /// Relative error bound for 9–11
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value_t = 25)]
    block: usize,
    /// Power iterations for 9 and 11, pass budget for 10
    #[arg(long, default_value_t = 1)]
    passes: usize,
    #[arg(long)]
    max_rank: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), BenchError> {
    let out = |default: &str| cli.output.clone().unwrap_or_else(|| PathBuf::from(default));
    match &cli.command {
        Command::Gen { kind, n, rank, delta } => {
            let spec = SyntheticSpec {
                kind: *kind,
                n: *n,
                rank: *rank,
                delta: *delta,
                seed: cli.seed,
            };
            let path = out("tensor.tt3d");
            save_tt3d(&path, &generate(&spec)?)?;
            println!("wrote {} ({n}x{n}x{n})", path.display());
        }
        Command::Approx {
            input,
            alg,
            knobs,
            factors,
        } => {
            let x = load_tt3d(input).map_err(|e| at(input, e.into()))?;
            let p = RunParams {
                l: knobs.l,
                k: knobs.k,
                h: knobs.h,
                rank: knobs.rank,
                eps: knobs.eps,
                block: knobs.block,
                q: knobs.passes,
                max_rank: knobs.max_rank,
                seed: cli.seed,
            };
            let outcome = run(&x, *alg, &p)?;
            for (name, f) in &outcome.factors {
                save_tt3d(factors.join(format!("{alg}_{name}.tt3d")), f)?;
            }
            let rec = record(&x, &outcome, &p)?;
            append_records(out("runs.csv"), std::slice::from_ref(&rec))?;
            report(&rec);
        }
        Command::Bench { table, size } => {
            let cfg = BenchConfig {
                table: Table::from_id(*table)?,
                sizes: (!size.is_empty()).then(|| size.clone()),
                trials: cli.trials,
                seed: cli.seed,
                desk: cli.desk,
            };
            let rows = run_bench(&cfg)?;
            let path = out("runs.csv");
            append_records(&path, &rows)?;
            for (alg, med) in median_errors(&rows) {
                println!("{alg:<14} median rel_err {med:.3e}");
            }
            println!("{} rows appended to {}", rows.len(), path.display());
        }
        Command::Compress {
            input,
            alg,
            l,
            k,
            h,
            rank,
            csv,
        } => {
            let img = read_image(input).map_err(|e| at(input, e))?;
            let x = img.to_tensor();
            let p = RunParams {
                l: *l,
                k: *k,
                h: *h,
                rank: *rank,
                seed: cli.seed,
                ..RunParams::default()
            };
            let outcome = run(&x, *alg, &p)?;
            let rec = record(&x, &outcome, &p)?;
            let back = Image::from_tensor(&outcome.approx)?;
            write_image(out(&default_image("compressed", &img)), &back)?;
            append_records(csv, std::slice::from_ref(&rec))?;
            report(&rec);
            println!("psnr {}", psnr_text(&x, &back.to_tensor())?);
        }
        Command::Complete {
            input,
            factor,
            alg,
            rank,
            l,
            k,
            h,
            iters,
            tol,
            sigma,
            smooth_iterates,
            reference,
            csv,
        } => {
            let img = read_image(input).map_err(|e| at(input, e))?;
            let op = completion_operator(*alg, *rank, *l, *k, *h, cli.seed)?;
            let masked = upsample_mask(&img.to_tensor(), *factor)?;
            let start = Instant::now();
            let (raw, smooth, iterations) = if *factor == 1 {
                // nothing is missing; the command reduces to one low-rank map
                let x = op.apply(masked.data(), 0)?;
                (x.clone(), x, 1)
            } else {
                let cfg = CompletionConfig {
                    max_iters: *iters,
                    tol: *tol,
                    filter_sigma: *sigma,
                    smooth_iterates: *smooth_iterates,
                    ..CompletionConfig::new(op)
                };
                let c = complete(&masked, &cfg)?;
                (c.unfiltered, c.filtered, c.iterations)
            };
            let time_s = start.elapsed().as_secs_f64();
            let result = Image::from_tensor(&smooth)?;
            write_image(out(&default_image("completed", &img)), &result)?;

            let mut rec = RunRecord::new(format!("complete/{alg}"), raw.rows(), cli.seed);
            rec.rank = Some(*rank);
            rec.passes = Some(iterations);
            rec.time_s = time_s;
            rec.est_rank = *rank;
            println!("{iterations} iterations in {time_s:.2} s");
            if let Some(path) = reference {
                let truth = read_image(path).map_err(|e| at(path, e))?.to_tensor();
                rec.rel_err = rel_err(&truth, &smooth)?;
                println!("psnr before filter {}", psnr_text(&truth, &raw)?);
                println!("psnr after filter  {}", psnr_text(&truth, &result.to_tensor())?);
            } else {
                // score the observed pixels only
                rec.rel_err = rel_err(masked.data(), &masked.mask().hadamard(&smooth)?)?;
            }
            append_records(csv, std::slice::from_ref(&rec))?;
            println!("rel_err {:.4e}", rec.rel_err);
        }
    }
    Ok(())
}

fn completion_operator(
    alg: Algorithm,
    rank: usize,
    l: Option<usize>,
    k: Option<usize>,
    h: usize,
    seed: u64,
) -> Result<LowRankOperator, BenchError> {
    let l = l.unwrap_or(rank + 20);
    let k = k.unwrap_or(rank + 20);
    let params = SketchParams::new(l, k, h, rank, seed);
    Ok(match alg {
        Algorithm::Tsvd => LowRankOperator::TruncatedSvd { rank },
        Algorithm::Alg4 => LowRankOperator::Cur { l, k },
        Algorithm::Alg5 => LowRankOperator::Qb { l, k },
        Algorithm::Alg6 => LowRankOperator::SinglePass {
            alg: SinglePassAlg::Alg6,
            params,
        },
        Algorithm::Alg7 => LowRankOperator::SinglePass {
            alg: SinglePassAlg::Alg7,
            params,
        },
        Algorithm::Alg8 => LowRankOperator::SinglePass {
            alg: SinglePassAlg::Alg8,
            params,
        },
        Algorithm::Alg9 | Algorithm::Alg10 | Algorithm::Alg11 => LowRankOperator::FixedPrecision {
            alg: match alg {
                Algorithm::Alg9 => 9,
                Algorithm::Alg10 => 10,
                _ => 11,
            },
            config: FixedPrecisionConfig::new(1e-2, rank.min(10), 1, seed),
        },
    })
}

fn at(path: &Path, e: BenchError) -> BenchError {
    BenchError::Format(format!("{}: {e}", path.display()))
}

fn default_image(stem: &str, img: &Image) -> String {
    let ext = if img.channels == 1 { "pgm" } else { "ppm" };
    format!("{stem}.{ext}")
}

fn psnr_text(truth: &Tensor3, x: &Tensor3) -> Result<String, BenchError> {
    match psnr(truth, x) {
        Ok(db) => Ok(format!("{db:.3} dB")),
        Err(TubalError::IdenticalInputs) => Ok("inf (identical)".into()),
        Err(e) => Err(e.into()),
    }
}

fn report(rec: &RunRecord) {
    let passes = rec.pass_count.map_or_else(|| "-".to_string(), |p| p.to_string());
    println!(
        "{} n={} rank={} passes={} time={:.3}s rel_err={:.4e}",
        rec.algorithm, rec.n, rec.est_rank, passes, rec.time_s, rec.rel_err
    );
}
