use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::error;
use mmf_bench::curves::DECAY_CORE;
use mmf_bench::report::CompressionReport;
use mmf_bench::sweep::{load_mtx, read_manifest};
use mmf_bench::{
    run_decay_sweep, run_method, run_rank_sweep, run_sweep, write_decay_csv, write_outputs, write_rank_csv, Collection,
    MatrixSource, Method, SweepConfig,
};
use mmf_core::dataio::{gen_mixed_spectrum, parse_manifest, MatrixMetadata, MixedSpec};
use mmf_core::matcore::numerical_symmetry;
use mmf_core::{Accounting, SquareMatrix, StorageBudget};
use mmf_suitesparse::Fetcher;
use serde::Serialize;

/// Name accepted by `--matrix` for the built-in mixed-spectrum test matrix.
const MIXED: &str = "synthetic/mixed";

#[derive(Parser)]
#[command(name = "mmf-bench", version, about = "Matrix compression benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download every manifest matrix into the cache.
    Fetch {
        manifest: PathBuf,
        #[arg(long, default_value = "cache")]
        cache_dir: PathBuf,
        #[arg(long)]
        base_url: Option<String>,
    },
    /// Run a compression sweep from a TOML config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Symmetric MMF error against the decay rate `t`.
    Decay {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 6.0, 8.0, 10.0])]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = DECAY_CORE)]
        core: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hybrid error against CUR rank, with CUR-only and MMF-only levels.
    Rankscan {
        /// `group/name`, a path to a `.mtx` file, or `synthetic/mixed`.
        #[arg(long)]
        matrix: String,
        #[arg(long, value_delimiter = ',', required = true)]
        r_list: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
        #[arg(long, value_parser = parse_accounting, default_value = "sparse-coo")]
        accounting: Accounting,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compress one matrix with one method and write a JSON report.
    Factor {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        fraction: f64,
        #[arg(long, value_parser = parse_accounting, default_value = "sparse-coo")]
        accounting: Accounting,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CUR rank of the hybrid method; `n / 4` when unset.
        #[arg(long)]
        hybrid_rank: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_accounting(s: &str) -> Result<Accounting, String> {
    match s {
        "sparse-coo" => Ok(Accounting::SparseCoo),
        "dense" => Ok(Accounting::Dense),
        _ => Err(format!("expected `sparse-coo` or `dense`, got `{s}`")),
    }
}

/// Configuration mistakes exit with 2, everything else with 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

#[derive(Serialize)]
struct FactorReport {
    #[serde(flatten)]
    report: CompressionReport,
    budget: u64,
    storage: u64,
}

fn budget_for(fraction: f64, accounting: Accounting, a: &SquareMatrix) -> anyhow::Result<u64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(UsageError(format!("fraction {fraction} is not in (0, 1]")).into());
    }
    Ok(StorageBudget::new(fraction, accounting)?.scalars(a))
}

fn resolve_matrix(
    spec: &str,
    data_dir: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
) -> anyhow::Result<(SquareMatrix, MatrixMetadata)> {
    if spec == MIXED {
        let a = gen_mixed_spectrum(MixedSpec::reference());
        let meta = MatrixMetadata {
            name: "mixed".into(),
            group: "synthetic".into(),
            n: a.n(),
            nnz: a.nnz(),
            kind: "synthetic".into(),
            numerical_symmetry: numerical_symmetry(&a),
        };
        return Ok((a, meta));
    }
    if Path::new(spec).is_file() {
        return load_mtx(Path::new(spec)).map_err(anyhow::Error::msg);
    }
    let entry = parse_manifest(spec)
        .ok()
        .and_then(|mut v| v.pop())
        .ok_or_else(|| UsageError(format!("`{spec}` is neither a file nor group/name")))?;
    Collection::new(data_dir, cache_dir)
        .load(&entry)
        .map_err(anyhow::Error::msg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fetch {
            manifest,
            cache_dir,
            base_url,
        } => {
            let entries = read_manifest(&manifest).map_err(|e| UsageError(e.to_string()))?;
            let mut fetcher = Fetcher::http(cache_dir);
            if let Some(url) = base_url {
                fetcher = fetcher.base_url(url);
            }
            let mut failed = 0;
            for e in &entries {
                match fetcher.fetch(&e.group, &e.name) {
                    Ok((_, m)) => println!("{}\tn={}\tnnz={}\t{}", e.id(), m.n, m.nnz, m.kind),
                    Err(err) => {
                        failed += 1;
                        error!("{}: {err}", e.id());
                    }
                }
            }
            if failed > 0 {
                bail!("{failed} of {} matrices could not be fetched", entries.len());
            }
        }
        Command::Sweep { config } => {
            let config = SweepConfig::load(&config).map_err(|e| UsageError(e.to_string()))?;
            let source = Collection::new(config.data_dir.clone(), config.cache_dir.clone());
            let outcome = run_sweep(&config, &source)?;
            write_outputs(&outcome, &config.output)?;
            for t in &outcome.tables {
                println!("{}", t.to_markdown());
            }
            println!(
                "{} summaries, {} failures, written to {}",
                outcome.reports.len(),
                outcome.failures.len(),
                config.output.display()
            );
        }
        Command::Decay {
            n,
            t_list,
            core,
            seed,
            out,
        } => {
            if t_list.iter().any(|&t| t.is_nan() || t <= 0.0) {
                return Err(UsageError("every t must be positive".into()).into());
            }
            let points = run_decay_sweep(n, &t_list, core, seed)?;
            let file = File::create(&out).with_context(|| out.display().to_string())?;
            write_decay_csv(&points, BufWriter::new(file))?;
        }
        Command::Rankscan {
            matrix,
            r_list,
            fraction,
            accounting,
            seed,
            data_dir,
            cache_dir,
            out,
        } => {
            let (a, _) = resolve_matrix(&matrix, data_dir, cache_dir)?;
            let budget = budget_for(fraction, accounting, &a)?;
            let sweep = run_rank_sweep(&a, &r_list, budget, seed)?;
            let file = File::create(&out).with_context(|| out.display().to_string())?;
            write_rank_csv(&sweep, BufWriter::new(file))?;
        }
        Command::Factor {
            matrix,
            method,
            fraction,
            accounting,
            seed,
            hybrid_rank,
            out,
        } => {
            let (a, meta) = load_mtx(&matrix).map_err(UsageError)?;
            let budget = budget_for(fraction, accounting, &a)?;
            let rank = hybrid_rank.unwrap_or(a.n() / 4).max(1);
            let run = run_method(&a, method, budget, rank, seed)?;
            let report = FactorReport {
                report: CompressionReport {
                    matrix: meta,
                    method,
                    fraction,
                    trials: 1,
                    mean_error: run.error,
                    std_error: 0.0,
                    wall_time_s: None,
                },
                budget,
                storage: run.storage,
            };
            std::fs::write(&out, serde_json::to_string_pretty(&report)? + "\n")
                .with_context(|| out.display().to_string())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
