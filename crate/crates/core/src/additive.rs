//! Additive factorization: `A = S + K` with `S` symmetric and `K` skew, each
//! factorized on its own and the two approximants summed.
//!
//! Symmetric and skew matrices are Frobenius-orthogonal, and each half's
//! approximant stays in its class, so the squared error splits exactly into
//! the two halves' squared errors.

use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};
use crate::exec::Exec;
use crate::matcore::{split_symmetric_skew, SquareMatrix};
use crate::skew::{reconstruct_skew, SkewFactorization, SkewMmf};
use crate::storage::{skew_storage, solve_skew_core, solve_sym_core, sym_storage};
use crate::sym::{reconstruct_sym, SymFactorization, SymmetricMmf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveFactorization {
    pub n: usize,
    /// `None` when the symmetric half is zero or received no storage.
    pub sym: Option<SymFactorization>,
    pub skew: Option<SkewFactorization>,
}

impl AdditiveFactorization {
    pub fn storage(&self) -> u64 {
        self.sym.as_ref().map_or(0, |f| f.storage()) + self.skew.as_ref().map_or(0, |f| f.storage())
    }
}

/// Splits `budget` scalars between the halves in proportion to their squared
/// Frobenius mass and returns the core sizes (`None` = half not stored).
pub fn allocate_budget(
    n: usize,
    sym_mass2: f64,
    skew_mass2: f64,
    budget: u64,
) -> Result<(Option<usize>, Option<usize>)> {
    let total = sym_mass2 + skew_mass2;
    if total == 0.0 {
        return Ok((None, None));
    }
    let sym_only = || solve_sym_core(n, budget).map(|d| (Some(d), None));
    let skew_only = || solve_skew_core(n, budget).map(|d| (None, Some(d)));
    if skew_mass2 == 0.0 {
        return sym_only();
    }
    if sym_mass2 == 0.0 {
        return skew_only();
    }
    let sym_share = ((budget as f64 * sym_mass2 / total).floor() as u64).clamp(1, budget.saturating_sub(1).max(1));
    let skew_share = budget - sym_share;
    match (solve_sym_core(n, sym_share), solve_skew_core(n, skew_share)) {
        (Ok(ds), Ok(dk)) => Ok((Some(ds), Some(dk))),
        // one half cannot be stored at its share: the other takes everything
        (Ok(_), Err(_)) | (Err(_), Ok(_)) => {
            let prefer_sym = sym_mass2 >= skew_mass2;
            let first = if prefer_sym { sym_only() } else { skew_only() };
            first.or_else(|_| if prefer_sym { skew_only() } else { sym_only() })
        }
        (Err(_), Err(_)) => sym_only()
            .or_else(|_| skew_only())
            .map_err(|_| MmfError::BudgetTooSmall {
                budget,
                minimum: (1..=n)
                    .map(|d| sym_storage(n, d))
                    .chain((0..=n).map(|d| skew_storage(n, d)))
                    .min()
                    .unwrap_or(0),
            }),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdditiveMmf {
    pub budget: u64,
    pub seed: u64,
    pub exec: Exec,
}

impl AdditiveMmf {
    pub fn new(budget: u64) -> Self {
        Self {
            budget,
            seed: 0,
            exec: Exec::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn factor(&self, a: &SquareMatrix) -> Result<AdditiveFactorization> {
        let n = a.n();
        let (s, k) = split_symmetric_skew(a);
        let (ds, dk) = allocate_budget(n, s.frobenius_norm().powi(2), k.frobenius_norm().powi(2), self.budget)?;
        let (seed, exec) = (self.seed, self.exec);
        let (sym, skew) = exec.join(
            || {
                ds.map(|d| SymmetricMmf::new(d).seed(seed).exec(exec).factor(&s))
                    .transpose()
            },
            || dk.map(|d| SkewMmf::new(d).seed(seed).exec(exec).factor(&k)).transpose(),
        );
        Ok(AdditiveFactorization {
            n,
            sym: sym?,
            skew: skew?,
        })
    }
}

/// Additive factorization within `budget` scalars.
pub fn factor_additive(a: &SquareMatrix, budget: u64, seed: u64) -> Result<AdditiveFactorization> {
    AdditiveMmf::new(budget).seed(seed).factor(a)
}

/// Sum of the two half reconstructions.
pub fn reconstruct_additive(f: &AdditiveFactorization) -> SquareMatrix {
    let zero = || SquareMatrix::sparse(f.n, Vec::new()).expect("empty matrix is valid");
    let s = f.sym.as_ref().map_or_else(zero, reconstruct_sym);
    let k = f.skew.as_ref().map_or_else(zero, reconstruct_skew);
    s.add(&k).expect("halves share a dimension")
}
