//! Compression benchmarks for multiresolution factorizations against a CUR
//! baseline: budgeted sweeps over a matrix manifest, win-rate tables, and the
//! decay and rank error curves.

pub mod config;
pub mod curves;
pub mod method;
pub mod report;
pub mod sweep;

pub use config::{ConfigError, SweepConfig};
pub use curves::{run_decay_sweep, run_rank_sweep, write_decay_csv, write_rank_csv, DecayPoint, RankPoint, RankSweep};
pub use method::{method_storage, run_method, solve_core_size, CoreSize, Factorization, Method, MethodRun, RunError};
pub use report::{CompressionReport, RunRecord, WinCell, WinRow, WinTable};
pub use sweep::{run_sweep, write_outputs, Collection, Failure, MatrixSource, SweepError, SweepOutcome};
