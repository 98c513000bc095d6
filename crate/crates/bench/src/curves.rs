//! Error curves: symmetric MMF against spectral decay rate, and the hybrid
//! against CUR rank with the two single-stage methods as reference levels.

use std::io::Write;

use mmf_core::dataio::{gen_decay_matrix, DecaySpec};
use mmf_core::matcore::frobenius_relative_error;
use mmf_core::{factor_symmetric, hybrid_compress, reconstruct_sym, MmfError, SquareMatrix};
use serde::{Deserialize, Serialize};

use crate::method::{run_method, Method, RunError};

/// Core size used for the decay sweep at `n = 200`.
pub const DECAY_CORE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub t: f64,
    pub error: f64,
}

/// Symmetric MMF error on `gen_decay_matrix(n, t, seed)` for each `t`.
pub fn run_decay_sweep(n: usize, t_list: &[f64], core: usize, seed: u64) -> Result<Vec<DecayPoint>, MmfError> {
    t_list
        .iter()
        .map(|&t| {
            let a = gen_decay_matrix(DecaySpec { n, t, seed })?;
            let f = factor_symmetric(&a, core, seed)?;
            let error = frobenius_relative_error(&a, &reconstruct_sym(&f))?;
            Ok(DecayPoint { t, error })
        })
        .collect()
}

pub fn write_decay_csv(points: &[DecayPoint], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPoint {
    pub r: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSweep {
    pub budget: u64,
    pub cur_only: f64,
    pub mmf_only: f64,
    pub hybrid: Vec<RankPoint>,
}

impl RankSweep {
    /// Lowest hybrid error over the sweep.
    pub fn best_hybrid(&self) -> Option<RankPoint> {
        self.hybrid.iter().copied().min_by(|a, b| a.error.total_cmp(&b.error))
    }
}

/// Hybrid error per CUR rank, all stages fitted to `budget` scalars.
///
/// The MMF-only reference is the GreedyTopN direct method.
pub fn run_rank_sweep(a: &SquareMatrix, r_list: &[usize], budget: u64, seed: u64) -> Result<RankSweep, RunError> {
    let cur_only = run_method(a, Method::Cur, budget, 1, seed)?.error;
    let mmf_only = run_method(a, Method::DirectGreedyTopN, budget, 1, seed)?.error;
    let hybrid = r_list
        .iter()
        .map(|&r| {
            let h = hybrid_compress(a, r, budget, seed)?;
            let storage = h.factor.storage();
            if storage > budget {
                return Err(RunError::OverBudget {
                    method: Method::Hybrid,
                    storage,
                    budget,
                });
            }
            Ok(RankPoint { r, error: h.error })
        })
        .collect::<Result<_, RunError>>()?;
    Ok(RankSweep {
        budget,
        cur_only,
        mmf_only,
        hybrid,
    })
}

/// `series,r,error` with one `hybrid` row per rank and one row for each
/// reference level (empty `r`).
pub fn write_rank_csv(sweep: &RankSweep, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["series", "r", "error"])?;
    for p in &sweep.hybrid {
        w.write_record(["hybrid", &p.r.to_string(), &p.error.to_string()])?;
    }
    w.write_record(["cur-only", "", &sweep.cur_only.to_string()])?;
    w.write_record(["mmf-only", "", &sweep.mmf_only.to_string()])?;
    w.flush()?;
    Ok(())
}
