//! The compression methods under comparison and how each is fitted to a
//! storage budget.

use std::fmt;
use std::str::FromStr;

use mmf_core::matcore::frobenius_relative_error;
use mmf_core::storage::{solve_cur_rank, solve_direct_core};
use mmf_core::{
    cur_decompose, factor_additive, factor_direct, hybrid_compress, reconstruct_additive, reconstruct_direct,
    AdditiveFactorization, CurFactors, DirectFactorization, HybridResult, MmfError, Sparsifier, SparsifierKind,
    SquareMatrix,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Additive,
    #[serde(rename = "direct-corediag")]
    #[value(name = "direct-corediag")]
    DirectCoreDiag,
    #[serde(rename = "direct-topn")]
    #[value(name = "direct-topn")]
    DirectTopN,
    #[serde(rename = "direct-greedytopn")]
    #[value(name = "direct-greedytopn")]
    DirectGreedyTopN,
    Cur,
    Hybrid,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Additive,
        Method::DirectCoreDiag,
        Method::DirectTopN,
        Method::DirectGreedyTopN,
        Method::Cur,
        Method::Hybrid,
    ];

    pub fn baseline() -> Self {
        Method::Cur
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Additive => "additive",
            Method::DirectCoreDiag => "direct-corediag",
            Method::DirectTopN => "direct-topn",
            Method::DirectGreedyTopN => "direct-greedytopn",
            Method::Cur => "cur",
            Method::Hybrid => "hybrid",
        }
    }

    fn sparsifier(self) -> Option<SparsifierKind> {
        match self {
            Method::DirectCoreDiag => Some(SparsifierKind::CoreDiagonal),
            Method::DirectTopN => Some(SparsifierKind::TopN),
            Method::DirectGreedyTopN => Some(SparsifierKind::GreedyTopN),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Sizes chosen for a method under a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreSize {
    /// Core size of the MMF part.
    pub d: Option<usize>,
    /// Retained off-core entries of the direct methods.
    pub m: Option<usize>,
    /// CUR rank.
    pub r: Option<usize>,
}

/// Any factorization a method can produce.
#[derive(Debug, Clone)]
pub enum Factorization {
    Additive(AdditiveFactorization),
    Direct(DirectFactorization),
    Cur(CurFactors),
    /// Only the MMF stage is counted against the budget.
    Hybrid(HybridResult),
}

impl Factorization {
    pub fn reconstruct(&self) -> SquareMatrix {
        match self {
            Factorization::Additive(f) => reconstruct_additive(f),
            Factorization::Direct(f) => reconstruct_direct(f),
            Factorization::Cur(f) => SquareMatrix::Dense(f.product()),
            Factorization::Hybrid(h) => reconstruct_direct(&h.factor),
        }
    }
}

/// Stored scalars of a factorization.
pub fn method_storage(f: &Factorization) -> u64 {
    match f {
        Factorization::Additive(f) => f.storage(),
        Factorization::Direct(f) => f.storage(),
        Factorization::Cur(f) => f.storage(),
        Factorization::Hybrid(h) => h.factor.storage(),
    }
}

/// Largest sizes of `method` fitting `budget` scalars on an `n x n` input.
///
/// The additive method splits its budget by the mass of the two halves, so
/// its sizes depend on the matrix and are not reported here.
pub fn solve_core_size(n: usize, method: Method, budget: u64) -> Result<CoreSize, MmfError> {
    let none = CoreSize {
        d: None,
        m: None,
        r: None,
    };
    Ok(match method {
        Method::Additive => none,
        Method::Cur => CoreSize {
            r: Some(solve_cur_rank(n, budget)?),
            ..none
        },
        Method::DirectCoreDiag | Method::DirectTopN | Method::DirectGreedyTopN | Method::Hybrid => {
            let d = solve_direct_core(n, budget)?;
            CoreSize {
                d: Some(d),
                m: Some(n - d),
                r: None,
            }
        }
    })
}

/// One budgeted run.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub factorization: Factorization,
    pub error: f64,
    pub storage: u64,
    pub budget: u64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Mmf(#[from] MmfError),
    #[error("{method} stored {storage} scalars, over its budget of {budget}")]
    OverBudget { method: Method, storage: u64, budget: u64 },
}

/// Fits `method` to `budget` scalars and measures its relative Frobenius error.
///
/// `hybrid_rank` is the CUR rank of the hybrid method and is ignored otherwise.
pub fn run_method(
    a: &SquareMatrix,
    method: Method,
    budget: u64,
    hybrid_rank: usize,
    seed: u64,
) -> Result<MethodRun, RunError> {
    let n = a.n();
    let factorization = match method {
        Method::Additive => Factorization::Additive(factor_additive(a, budget, seed)?),
        Method::Cur => Factorization::Cur(cur_decompose(a, solve_cur_rank(n, budget)?, seed)?),
        Method::Hybrid => Factorization::Hybrid(hybrid_compress(a, hybrid_rank.clamp(1, n), budget, seed)?),
        direct => {
            let kind = direct.sparsifier().expect("direct method");
            let d = solve_direct_core(n, budget)?;
            Factorization::Direct(factor_direct(a, d, Sparsifier::default_for(kind, n, d), seed)?)
        }
    };
    let storage = method_storage(&factorization);
    if storage > budget {
        return Err(RunError::OverBudget {
            method,
            storage,
            budget,
        });
    }
    let error = match &factorization {
        Factorization::Cur(f) => f.relative_error(a)?,
        Factorization::Hybrid(h) => h.error,
        f => frobenius_relative_error(a, &f.reconstruct())?,
    };
    Ok(MethodRun {
        factorization,
        error,
        storage,
        budget,
    })
}
