//! Symmetric multiresolution factorization
//! `A ~ G_1 ... G_L H G_L^T ... G_1^T` with an `S_L`-core-diagonal `H`.
//!
//! Each level draws a random active index `i`, pairs it with the active
//! index whose row has the largest inner product with row `i` (over the
//! active columns), rotates the pair so that their 2x2 Gram block becomes
//! diagonal, and retires whichever of the two carries less off-diagonal
//! energy. Retired indices become wavelet coordinates and are never touched
//! again. After `n - d` levels the rotated matrix is truncated to its
//! core block plus diagonal.

use serde::{Deserialize, Serialize};

use crate::core_sparse::CoreSparse;
use crate::error::{MmfError, Result};
use crate::exec::Exec;
use crate::greedy::{greedy_conjugation, unrotate};
use crate::matcore::{GivensRotation, IndexSet, SquareMatrix};

/// Relative max-norm tolerance for accepting an input as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymFactorization {
    pub n: usize,
    /// `G_1 ... G_L` in application order; level `l` computes `A <- G_l^T A G_l`.
    pub rotations: Vec<GivensRotation>,
    /// Retired indices, in retirement order.
    pub retired: Vec<usize>,
    pub core_set: IndexSet,
    pub h: CoreSparse,
}

/// The rotation stage of a symmetric factorization, before truncation.
#[derive(Debug, Clone)]
pub struct SymRotation {
    pub n: usize,
    pub rotations: Vec<GivensRotation>,
    pub retired: Vec<usize>,
    pub core_set: IndexSet,
    /// `G_L^T ... G_1^T A G_1 ... G_L`.
    pub rotated: SquareMatrix,
}

impl SymRotation {
    fn with_h(&self, h: CoreSparse) -> SymFactorization {
        SymFactorization {
            n: self.n,
            rotations: self.rotations.clone(),
            retired: self.retired.clone(),
            core_set: self.core_set.clone(),
            h,
        }
    }

    /// Core-diagonal truncation of the rotated matrix.
    pub fn truncate(&self) -> SymFactorization {
        self.with_h(CoreSparse::core_diagonal(&self.rotated, &self.core_set))
    }

    /// Keeps the rotated matrix whole; reconstructs the input up to rounding.
    pub fn untruncated(&self) -> SymFactorization {
        self.with_h(CoreSparse::lossless(&self.rotated, &self.core_set, &self.core_set))
    }

    /// Frobenius norm of what core-diagonal truncation with `core` would discard.
    pub fn dropped_mass(&self, core: &IndexSet) -> f64 {
        let h = CoreSparse::core_diagonal(&self.rotated, core);
        (self.rotated.frobenius_norm().powi(2) - h.mass2()).max(0.0).sqrt()
    }
}

pub(crate) fn check_symmetric(a: &SquareMatrix) -> Result<()> {
    let defect = a.transpose_defect(1.0);
    let tolerance = SYMMETRY_TOLERANCE * a.max_abs();
    if defect > tolerance {
        return Err(MmfError::NotSymmetric { defect, tolerance });
    }
    Ok(())
}

/// Builder for symmetric factorizations.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricMmf {
    pub core_size: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl SymmetricMmf {
    pub fn new(core_size: usize) -> Self {
        Self {
            core_size,
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

    pub fn rotate(&self, a: &SquareMatrix) -> Result<SymRotation> {
        let n = a.n();
        if self.core_size == 0 || self.core_size > n {
            return Err(MmfError::CoreSizeOutOfRange { d: self.core_size, n });
        }
        check_symmetric(a)?;
        let run = greedy_conjugation(a, self.core_size, self.seed, self.exec, |_, _| {});
        Ok(SymRotation {
            n,
            rotations: run.rotations,
            retired: run.retired,
            core_set: run.active,
            rotated: run.rotated,
        })
    }

    pub fn factor(&self, a: &SquareMatrix) -> Result<SymFactorization> {
        Ok(self.rotate(a)?.truncate())
    }
}

/// Symmetric factorization with core size `d`.
pub fn factor_symmetric(a: &SquareMatrix, d: usize, seed: u64) -> Result<SymFactorization> {
    SymmetricMmf::new(d).seed(seed).factor(a)
}

/// `G_1 ... G_L H G_L^T ... G_1^T`.
pub fn reconstruct_sym(f: &SymFactorization) -> SquareMatrix {
    unrotate(&f.h.to_matrix(), &f.rotations, &f.rotations, Exec::default())
}

impl SymFactorization {
    pub fn storage(&self) -> u64 {
        crate::storage::ROTATION_SCALARS * self.rotations.len() as u64 + self.h.storage()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{frobenius_relative_error, DenseMatrix};

    fn sym_sample(n: usize) -> SquareMatrix {
        let b = DenseMatrix::from_fn(n, |i, j| ((i * 13 + j * 7) % 17) as f64 - 8.0);
        SquareMatrix::Dense(b.add(&b.transpose()))
    }

    #[test]
    fn diagonal_is_exact() {
        let a = SquareMatrix::dense(
            4,
            vec![
                1.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.5,
            ],
        )
        .unwrap();
        for seed in 0..5 {
            let f = factor_symmetric(&a, 1, seed).unwrap();
            assert!(f.rotations.iter().all(|g| g.theta == 0.0));
            assert_eq!(frobenius_relative_error(&a, &reconstruct_sym(&f)).unwrap(), 0.0);
        }
    }

    #[test]
    fn full_core_is_trivial() {
        let a = sym_sample(5);
        let f = factor_symmetric(&a, 5, 3).unwrap();
        assert!(f.rotations.is_empty());
        assert_eq!(f.h.to_dense(), a.to_dense());
    }

    #[test]
    fn schedule_and_nesting() {
        let a = sym_sample(9);
        let f = factor_symmetric(&a, 3, 11).unwrap();
        assert_eq!(f.rotations.len(), 6);
        assert_eq!(f.core_set.len(), 3);
        for (level, &t) in f.retired.iter().enumerate() {
            for g in &f.rotations[level + 1..] {
                assert!(g.i != t && g.j != t, "retired index {t} reused");
            }
        }
        // H is core-diagonal
        for &(r, c, _) in f.h.offcore() {
            assert_eq!(r, c);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = SquareMatrix::dense(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(factor_symmetric(&a, 1, 0), Err(MmfError::NotSymmetric { .. })));
        let s = sym_sample(3);
        assert!(matches!(
            factor_symmetric(&s, 0, 0),
            Err(MmfError::CoreSizeOutOfRange { .. })
        ));
        assert!(matches!(
            factor_symmetric(&s, 4, 0),
            Err(MmfError::CoreSizeOutOfRange { .. })
        ));
    }

    #[test]
    fn zeroed_h_reconstructs_zero() {
        let a = sym_sample(6);
        let mut f = factor_symmetric(&a, 2, 1).unwrap();
        f.h = f.h.zeroed();
        assert_eq!(reconstruct_sym(&f).max_abs(), 0.0);
    }
}
