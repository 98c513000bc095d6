//! Factorization of skew-symmetric matrices into a core block plus disjoint
//! 2x2 blocks `[[0, l], [-l, 0]]` (real Murnaghan form outside the core).
//!
//! Rotation selection follows the symmetric path; for a skew `K` the row Gram
//! matrix `K K^T` equals `K^T K = -K^2`, which is symmetric positive
//! semidefinite. Conjugation by orthogonal rotations keeps the matrix skew.

use serde::{Deserialize, Serialize};

use crate::core_sparse::CoreSparse;
use crate::error::{MmfError, Result};
use crate::exec::Exec;
use crate::greedy::{greedy_conjugation, unrotate};
use crate::matcore::{GivensRotation, IndexSet, SquareMatrix};
use crate::sym::SYMMETRY_TOLERANCE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewFactorization {
    pub n: usize,
    pub rotations: Vec<GivensRotation>,
    pub retired: Vec<usize>,
    pub core_set: IndexSet,
    /// Core block plus mirrored pairs `(p, q, l)`, `(q, p, -l)`.
    pub h: CoreSparse,
}

#[derive(Debug, Clone)]
pub struct SkewRotation {
    pub n: usize,
    pub rotations: Vec<GivensRotation>,
    pub retired: Vec<usize>,
    pub core_set: IndexSet,
    pub rotated: SquareMatrix,
}

impl SkewRotation {
    fn with_h(&self, h: CoreSparse) -> SkewFactorization {
        SkewFactorization {
            n: self.n,
            rotations: self.rotations.clone(),
            retired: self.retired.clone(),
            core_set: self.core_set.clone(),
            h,
        }
    }

    pub fn truncate(&self) -> SkewFactorization {
        self.with_h(murnaghan_sparsify(&self.rotated, &self.core_set))
    }

    pub fn untruncated(&self) -> SkewFactorization {
        self.with_h(CoreSparse::lossless(&self.rotated, &self.core_set, &self.core_set))
    }
}

fn check_skew(k: &SquareMatrix) -> Result<()> {
    let defect = k.transpose_defect(-1.0);
    let tolerance = SYMMETRY_TOLERANCE * k.max_abs();
    if defect > tolerance {
        return Err(MmfError::NotSkew { defect, tolerance });
    }
    Ok(())
}

/// Keeps the core block of `rotated` and pairs the remaining indices into
/// disjoint 2-cycles by greedy largest-magnitude matching.
///
/// Candidate pairs `p < q` are scanned by decreasing `|H[p][q]|` (ties by
/// `(p, q)`); a pair is accepted when neither index is already paired. Each
/// accepted pair stores `(p, q, H[p][q])` and its exact negative mirror. With
/// an odd number of non-core indices one index stays unpaired.
pub fn murnaghan_sparsify(rotated: &SquareMatrix, core_set: &IndexSet) -> CoreSparse {
    let (block, off) = CoreSparse::split(rotated, core_set, core_set);
    let mut candidates: Vec<(usize, usize, f64)> = off
        .into_iter()
        .filter(|&(p, q, _)| p < q && !core_set.contains(p) && !core_set.contains(q))
        .collect();
    candidates.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut paired = vec![false; rotated.n()];
    let mut kept = Vec::new();
    for (p, q, v) in candidates {
        if paired[p] || paired[q] {
            continue;
        }
        paired[p] = true;
        paired[q] = true;
        kept.push((p, q, v));
        kept.push((q, p, -v));
    }
    CoreSparse::new(core_set.clone(), core_set.clone(), block, kept).expect("pairs are disjoint and off-core")
}

#[derive(Debug, Clone, Copy)]
pub struct SkewMmf {
    pub core_size: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl SkewMmf {
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

    /// Rotation stage; `observe(level, matrix)` sees every intermediate rotated matrix.
    pub fn rotate_observed<F>(&self, k: &SquareMatrix, mut observe: F) -> Result<SkewRotation>
    where
        F: FnMut(usize, &SquareMatrix),
    {
        let n = k.n();
        if self.core_size > n {
            return Err(MmfError::CoreSizeOutOfRange { d: self.core_size, n });
        }
        check_skew(k)?;
        let run = greedy_conjugation(k, self.core_size, self.seed, self.exec, |level, work| {
            observe(level, &work.snapshot())
        });
        Ok(SkewRotation {
            n,
            rotations: run.rotations,
            retired: run.retired,
            core_set: run.active,
            rotated: run.rotated,
        })
    }

    pub fn rotate(&self, k: &SquareMatrix) -> Result<SkewRotation> {
        let n = k.n();
        if self.core_size > n {
            return Err(MmfError::CoreSizeOutOfRange { d: self.core_size, n });
        }
        check_skew(k)?;
        let run = greedy_conjugation(k, self.core_size, self.seed, self.exec, |_, _| {});
        Ok(SkewRotation {
            n,
            rotations: run.rotations,
            retired: run.retired,
            core_set: run.active,
            rotated: run.rotated,
        })
    }

    pub fn factor(&self, k: &SquareMatrix) -> Result<SkewFactorization> {
        Ok(self.rotate(k)?.truncate())
    }
}

/// Skew factorization with core size `d` (zero allowed).
pub fn factor_skew(k: &SquareMatrix, d: usize, seed: u64) -> Result<SkewFactorization> {
    SkewMmf::new(d).seed(seed).factor(k)
}

pub fn reconstruct_skew(f: &SkewFactorization) -> SquareMatrix {
    unrotate(&f.h.to_matrix(), &f.rotations, &f.rotations, Exec::default())
}

impl SkewFactorization {
    pub fn storage(&self) -> u64 {
        crate::storage::ROTATION_SCALARS * self.rotations.len() as u64 + self.h.storage()
    }
}
