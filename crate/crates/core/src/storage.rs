//! A single storage ruler for every method: all stored values and indices
//! count as one scalar each.

use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};
use crate::matcore::SquareMatrix;

/// `(i, j, theta)`.
pub const ROTATION_SCALARS: u64 = 3;
/// `(row, col, value)`.
pub const ENTRY_SCALARS: u64 = 3;

/// How the size of the original matrix is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// `3 * nnz(A)`: coordinate storage.
    #[default]
    SparseCoo,
    /// `n^2`.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageBudget {
    pub fraction: f64,
    pub accounting: Accounting,
}

impl StorageBudget {
    pub fn new(fraction: f64, accounting: Accounting) -> Result<Self> {
        if !(fraction > 0.0 && fraction.is_finite()) {
            return Err(MmfError::BudgetTooSmall { budget: 0, minimum: 1 });
        }
        Ok(Self { fraction, accounting })
    }

    pub fn base(&self, a: &SquareMatrix) -> u64 {
        match self.accounting {
            Accounting::SparseCoo => ENTRY_SCALARS * a.nnz() as u64,
            Accounting::Dense => (a.n() as u64).pow(2),
        }
    }

    /// `ceil(fraction * base)`.
    pub fn scalars(&self, a: &SquareMatrix) -> u64 {
        (self.fraction * self.base(a) as f64).ceil() as u64
    }
}

/// Predicted storage of a symmetric factorization with core size `d`.
pub fn sym_storage(n: usize, d: usize) -> u64 {
    let (n, d) = (n as u64, d as u64);
    ROTATION_SCALARS * (n - d) + d * d + d + ENTRY_SCALARS * (n - d)
}

/// Predicted storage of a skew factorization with core size `d`.
pub fn skew_storage(n: usize, d: usize) -> u64 {
    let rotations = (n - d.max(1).min(n)) as u64;
    let pairs = ((n - d) / 2) as u64;
    let d = d as u64;
    ROTATION_SCALARS * rotations + d * d + d + 2 * ENTRY_SCALARS * pairs
}

/// Predicted storage of a direct factorization with core size `d` and `m`
/// retained off-core entries.
pub fn direct_storage(n: usize, d: usize, m: usize) -> u64 {
    let (n, d, m) = (n as u64, d as u64, m as u64);
    2 * ROTATION_SCALARS * (n - d) + d * d + 2 * d + ENTRY_SCALARS * m
}

/// `2 n r + r^2` values plus `2 r` indices.
pub fn cur_storage_for(n: usize, r: usize) -> u64 {
    let (n, r) = (n as u64, r as u64);
    2 * n * r + r * r + 2 * r
}

/// Largest `x` in `lo..=hi` with `cost(x) <= budget`, for a cost that first
/// decreases and then increases in `x`.
pub fn solve_largest<F>(lo: usize, hi: usize, budget: u64, cost: F) -> Result<usize>
where
    F: Fn(usize) -> u64,
{
    // walk down the decreasing branch to the minimizer
    let mut x0 = lo;
    while x0 < hi && cost(x0 + 1) <= cost(x0) {
        x0 += 1;
    }
    let minimum = cost(x0);
    if minimum > budget {
        return Err(MmfError::BudgetTooSmall { budget, minimum });
    }
    // cost is nondecreasing on x0..=hi
    let (mut good, mut bad) = (x0, hi + 1);
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if cost(mid) <= budget {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Core size for the symmetric path under `budget` scalars.
pub fn solve_sym_core(n: usize, budget: u64) -> Result<usize> {
    solve_largest(1, n, budget, |d| sym_storage(n, d))
}

pub fn solve_skew_core(n: usize, budget: u64) -> Result<usize> {
    solve_largest(0, n, budget, |d| skew_storage(n, d))
}

/// Core size for the direct path, with the default `m = n - d`.
pub fn solve_direct_core(n: usize, budget: u64) -> Result<usize> {
    solve_largest(1, n, budget, |d| direct_storage(n, d, n - d))
}

pub fn solve_cur_rank(n: usize, budget: u64) -> Result<usize> {
    let r = solve_largest(0, n, budget, |r| cur_storage_for(n, r))?;
    if r == 0 {
        return Err(MmfError::BudgetTooSmall {
            budget,
            minimum: cur_storage_for(n, 1),
        });
    }
    Ok(r)
}
