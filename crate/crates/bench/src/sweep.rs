//! The compression sweep: every manifest matrix, method, budget fraction and
//! trial, followed by summaries and win-rate tables.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use mmf_core::dataio::{parse_manifest, parse_matrix_market, ManifestEntry, MatrixMetadata};
use mmf_core::{Exec, SquareMatrix, StorageBudget};
use mmf_suitesparse::Fetcher;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::method::{run_method, Method};
use crate::report::{mean_errors, mean_std, win_table, CompressionReport, RunRecord, WinTable};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("cannot read manifest {path}: {source}")]
    Manifest { path: PathBuf, source: std::io::Error },
    #[error("invalid manifest: {0}")]
    ManifestSyntax(#[from] mmf_core::MmfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Where benchmark matrices come from.
pub trait MatrixSource: Sync {
    fn load(&self, entry: &ManifestEntry) -> Result<(SquareMatrix, MatrixMetadata), String>;
}

/// Explicit manifest paths first, then `<data_dir>/<group>/<name>.mtx`, then
/// the download cache.
#[derive(Default)]
pub struct Collection {
    pub data_dir: Option<PathBuf>,
    pub fetcher: Option<Fetcher>,
}

impl Collection {
    pub fn new(data_dir: Option<PathBuf>, cache_dir: Option<PathBuf>) -> Self {
        Self {
            data_dir,
            fetcher: cache_dir.map(Fetcher::http),
        }
    }
}

pub fn load_mtx(path: &Path) -> Result<(SquareMatrix, MatrixMetadata), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_matrix_market(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

impl MatrixSource for Collection {
    fn load(&self, entry: &ManifestEntry) -> Result<(SquareMatrix, MatrixMetadata), String> {
        let local = entry.path.clone().or_else(|| {
            let dir = self.data_dir.as_ref()?;
            let p = dir.join(&entry.group).join(format!("{}.mtx", entry.name));
            p.is_file().then_some(p)
        });
        let (a, mut meta) = match (local, &self.fetcher) {
            (Some(p), _) => load_mtx(&p)?,
            (None, Some(f)) => f.fetch(&entry.group, &entry.name).map_err(|e| e.to_string())?,
            (None, None) => return Err("not found locally and downloads are disabled".into()),
        };
        meta.group.clone_from(&entry.group);
        meta.name.clone_from(&entry.name);
        if meta.kind.is_empty() {
            meta.kind = "unknown".into();
        }
        Ok((a, meta))
    }
}

/// Something that did not produce a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub matrix: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fraction: Option<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    #[serde(skip)]
    pub records: Vec<RunRecord>,
    pub reports: Vec<CompressionReport>,
    pub failures: Vec<Failure>,
    pub tables: Vec<WinTable>,
}

/// Methods actually run: the configured ones plus the baseline.
fn methods_to_run(config: &SweepConfig) -> Vec<Method> {
    let mut out = config.methods.clone();
    if !out.contains(&config.baseline) {
        out.push(config.baseline);
    }
    out
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, SweepError> {
    let text = fs::read_to_string(path).map_err(|source| SweepError::Manifest {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = parse_manifest(&text)?;
    for e in &mut entries {
        if let Some(p) = e.path.as_mut().filter(|p| p.is_relative()) {
            *p = base.join(&*p);
        }
    }
    Ok(entries)
}

struct Item {
    matrix: usize,
    method: Method,
    fraction: f64,
    trial: usize,
}

/// Runs the sweep described by `config`; nothing is written.
pub fn run_sweep(config: &SweepConfig, source: &dyn MatrixSource) -> Result<SweepOutcome, SweepError> {
    let entries = read_manifest(&config.manifest)?;
    let mut failures = Vec::new();
    let mut matrices: Vec<(SquareMatrix, MatrixMetadata)> = Vec::new();
    for entry in &entries {
        let skip = |failures: &mut Vec<Failure>, message: String| {
            warn!("skipping {}: {message}", entry.id());
            failures.push(Failure {
                matrix: entry.id(),
                method: None,
                fraction: None,
                message,
            });
        };
        match source.load(entry) {
            Err(msg) => skip(&mut failures, msg),
            Ok((_, meta)) if config.max_n.is_some_and(|max| meta.n > max) => {
                skip(&mut failures, format!("n = {} exceeds max_n", meta.n))
            }
            Ok((_, meta))
                if config
                    .max_numerical_symmetry
                    .is_some_and(|max| meta.numerical_symmetry >= max) =>
            {
                skip(
                    &mut failures,
                    format!(
                        "numerical symmetry {:.4} is not below the limit",
                        meta.numerical_symmetry
                    ),
                )
            }
            Ok(loaded) => {
                info!("loaded {} (n = {}, nnz = {})", entry.id(), loaded.1.n, loaded.1.nnz);
                matrices.push(loaded);
            }
        }
    }

    let methods = methods_to_run(config);
    let mut items = Vec::new();
    for matrix in 0..matrices.len() {
        for &method in &methods {
            for &fraction in &config.fractions {
                for trial in 0..config.trials {
                    items.push(Item {
                        matrix,
                        method,
                        fraction,
                        trial,
                    });
                }
            }
        }
    }

    let results = Exec::default().map(&items, |item| {
        let (a, meta) = &matrices[item.matrix];
        let budget = StorageBudget::new(item.fraction, config.accounting)
            .expect("validated fraction")
            .scalars(a);
        let seed = config.seed.wrapping_add(item.trial as u64);
        let rank = config.hybrid_rank.unwrap_or(meta.n / 4).max(1);
        let start = Instant::now();
        let run = run_method(a, item.method, budget, rank, seed);
        let elapsed = start.elapsed().as_secs_f64();
        let (storage, error, failure) = match run {
            Ok(r) => (Some(r.storage), Some(r.error), String::new()),
            Err(e) => (None, None, e.to_string()),
        };
        let record = RunRecord {
            group: meta.group.clone(),
            name: meta.name.clone(),
            kind: meta.kind.clone(),
            n: meta.n,
            nnz: meta.nnz,
            method: item.method,
            fraction: item.fraction,
            trial: item.trial,
            seed,
            budget,
            storage,
            error,
            failure,
        };
        (record, elapsed)
    });

    let mut reports = Vec::new();
    let per_config = config.trials;
    for (chunk, group) in results.chunks(per_config).zip(items.chunks(per_config)) {
        let (first, _) = &chunk[0];
        let meta = &matrices[group[0].matrix].1;
        if let Some((failed, _)) = chunk.iter().find(|(r, _)| r.error.is_none()) {
            failures.push(Failure {
                matrix: format!("{}/{}", meta.group, meta.name),
                method: Some(first.method),
                fraction: Some(first.fraction),
                message: failed.failure.clone(),
            });
            continue;
        }
        let errors: Vec<f64> = chunk.iter().filter_map(|(r, _)| r.error).collect();
        let (mean_error, std_error) = mean_std(&errors);
        let wall = chunk.iter().map(|(_, t)| t).sum::<f64>() / chunk.len() as f64;
        reports.push(CompressionReport {
            matrix: meta.clone(),
            method: first.method,
            fraction: first.fraction,
            trials: chunk.len(),
            mean_error,
            std_error,
            wall_time_s: config.timing.then_some(wall),
        });
    }

    let ids: Vec<(String, String)> = matrices
        .iter()
        .map(|(_, m)| (format!("{}/{}", m.group, m.name), m.kind.clone()))
        .collect();
    let means = mean_errors(&reports);
    let compared: BTreeSet<Method> = config.methods.iter().copied().collect();
    let tables = config
        .methods
        .iter()
        .filter(|&&m| m != config.baseline || compared.len() == 1)
        .map(|&m| win_table(&ids, &means, m, config.baseline, &config.fractions))
        .collect();

    Ok(SweepOutcome {
        records: results.into_iter().map(|(r, _)| r).collect(),
        reports,
        failures,
        tables,
    })
}

/// Writes `runs.csv`, `report.json` and `wins.md` into `dir`.
pub fn write_outputs(outcome: &SweepOutcome, dir: &Path) -> Result<(), SweepError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("runs.csv"))?;
    for r in &outcome.records {
        w.serialize(r)?;
    }
    w.flush()?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(outcome)? + "\n")?;
    let md: Vec<String> = outcome.tables.iter().map(WinTable::to_markdown).collect();
    fs::write(dir.join("wins.md"), md.join("\n"))?;
    Ok(())
}
