//! Direct two-sided factorization `A ~ P_1 ... P_L H Q_L^T ... Q_1^T`.
//!
//! Left rotations are chosen from row similarity and right rotations from
//! column similarity, interleaved one of each per level. A left rotation
//! leaves the column Gram matrix untouched and vice versa, so the two sides
//! only interact through their active sets. After `n - d` levels the fully
//! rotated matrix `P^T A Q` is reduced to a core-sparse `H` by one of three
//! sparsifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core_sparse::CoreSparse;
use crate::error::{MmfError, Result};
use crate::exec::Exec;
use crate::greedy::unrotate;
use crate::matcore::{givens_from_gram2, GivensRotation, IndexSet, SquareMatrix};
use crate::work::Work;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SparsifierKind {
    /// Off-core diagonal positions only.
    CoreDiagonal,
    /// Largest-magnitude off-core entries.
    TopN,
    /// Largest-magnitude off-core entries with no two sharing a row or a column.
    GreedyTopN,
}

/// A sparsifier together with its off-core entry budget `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sparsifier {
    pub kind: SparsifierKind,
    pub m: usize,
}

impl Sparsifier {
    pub fn new(kind: SparsifierKind, m: usize) -> Self {
        Self { kind, m }
    }

    /// `m = n - d`.
    pub fn default_for(kind: SparsifierKind, n: usize, d: usize) -> Self {
        Self { kind, m: n - d }
    }
}

/// Orders candidates by decreasing magnitude, ties by position.
fn by_magnitude(entries: &mut [(usize, usize, f64)]) {
    entries.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()).then((a.0, a.1).cmp(&(b.0, b.1))));
}

/// Reduces a rotated matrix to core-sparse form.
///
/// The dense `core_rows x core_cols` block is always kept. Off-core entries
/// are then retained according to `sparsifier`, at most `m` of them.
pub fn sparsify(
    rotated: &SquareMatrix,
    core_rows: &IndexSet,
    core_cols: &IndexSet,
    sparsifier: Sparsifier,
) -> CoreSparse {
    let (block, mut off) = CoreSparse::split(rotated, core_rows, core_cols);
    let m = sparsifier.m;
    let kept = match sparsifier.kind {
        SparsifierKind::CoreDiagonal => {
            off.retain(|e| e.0 == e.1);
            by_magnitude(&mut off);
            off.truncate(m);
            off
        }
        SparsifierKind::TopN => {
            by_magnitude(&mut off);
            off.truncate(m);
            off
        }
        SparsifierKind::GreedyTopN => {
            by_magnitude(&mut off);
            let n = rotated.n();
            let (mut row_used, mut col_used) = (vec![false; n], vec![false; n]);
            let mut kept = Vec::with_capacity(m);
            for (r, c, v) in off {
                if kept.len() == m {
                    break;
                }
                if row_used[r] || col_used[c] {
                    continue;
                }
                row_used[r] = true;
                col_used[c] = true;
                kept.push((r, c, v));
            }
            kept
        }
    };
    CoreSparse::new(core_rows.clone(), core_cols.clone(), block, kept)
        .expect("selection is a subset of off-core entries")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectFactorization {
    pub n: usize,
    /// `P_1 ... P_L`; level `l` applies `A <- P_l^T A`.
    pub left: Vec<GivensRotation>,
    /// `Q_1 ... Q_L`; level `l` applies `A <- A Q_l`.
    pub right: Vec<GivensRotation>,
    pub retired_rows: Vec<usize>,
    pub retired_cols: Vec<usize>,
    pub core_rows: IndexSet,
    pub core_cols: IndexSet,
    pub h: CoreSparse,
}

impl DirectFactorization {
    pub fn storage(&self) -> u64 {
        crate::storage::ROTATION_SCALARS * (self.left.len() + self.right.len()) as u64 + self.h.storage()
    }
}

/// Rotation stage of a direct factorization, before sparsification.
#[derive(Debug, Clone)]
pub struct DirectRotation {
    pub n: usize,
    pub left: Vec<GivensRotation>,
    pub right: Vec<GivensRotation>,
    pub retired_rows: Vec<usize>,
    pub retired_cols: Vec<usize>,
    pub core_rows: IndexSet,
    pub core_cols: IndexSet,
    /// `P^T A Q`.
    pub rotated: SquareMatrix,
}

impl DirectRotation {
    fn with_h(&self, h: CoreSparse) -> DirectFactorization {
        DirectFactorization {
            n: self.n,
            left: self.left.clone(),
            right: self.right.clone(),
            retired_rows: self.retired_rows.clone(),
            retired_cols: self.retired_cols.clone(),
            core_rows: self.core_rows.clone(),
            core_cols: self.core_cols.clone(),
            h,
        }
    }

    pub fn sparsify(&self, sparsifier: Sparsifier) -> DirectFactorization {
        self.with_h(sparsify(&self.rotated, &self.core_rows, &self.core_cols, sparsifier))
    }

    pub fn untruncated(&self) -> DirectFactorization {
        self.with_h(CoreSparse::lossless(&self.rotated, &self.core_rows, &self.core_cols))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DirectMmf {
    pub core_size: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl DirectMmf {
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

    pub fn rotate(&self, a: &SquareMatrix) -> Result<DirectRotation> {
        let n = a.n();
        let d = self.core_size;
        if d == 0 || d > n {
            return Err(MmfError::CoreSizeOutOfRange { d, n });
        }
        let mut work = Work::new(a, self.exec);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut rows = IndexSet::full(n);
        let mut cols = IndexSet::full(n);
        let levels = n - d;
        let mut left = Vec::with_capacity(levels);
        let mut right = Vec::with_capacity(levels);
        let mut retired_rows = Vec::with_capacity(levels);
        let mut retired_cols = Vec::with_capacity(levels);

        for _ in 0..levels {
            // row phase
            let i = rows.get(rng.random_range(0..rows.len()));
            let line = work.row_gram_line(i, &rows, &cols);
            let j = line.argmax_partner(&rows, i).expect("at least two active rows");
            let theta = givens_from_gram2(work.row_norm2(i, &cols), line.value(j), work.row_norm2(j, &cols));
            let p = GivensRotation::new(i, j, theta, n)?;
            let (c, s) = p.cos_sin();
            work.rotate_rows(i, j, c, s);
            left.push(p);
            let (ni, nj) = (work.row_norm2(i, &cols), work.row_norm2(j, &cols));
            let t = if nj < ni || (nj == ni && j < i) { j } else { i };
            rows.remove(t);
            retired_rows.push(t);

            // column phase
            let i = cols.get(rng.random_range(0..cols.len()));
            let line = work.col_gram_line(i, &cols, &rows);
            let j = line.argmax_partner(&cols, i).expect("at least two active columns");
            let theta = givens_from_gram2(work.col_norm2(i, &rows), line.value(j), work.col_norm2(j, &rows));
            let q = GivensRotation::new(i, j, theta, n)?;
            let (c, s) = q.cos_sin();
            work.rotate_cols(i, j, c, s);
            right.push(q);
            let (ni, nj) = (work.col_norm2(i, &rows), work.col_norm2(j, &rows));
            let t = if nj < ni || (nj == ni && j < i) { j } else { i };
            cols.remove(t);
            retired_cols.push(t);
        }

        Ok(DirectRotation {
            n,
            left,
            right,
            retired_rows,
            retired_cols,
            core_rows: rows,
            core_cols: cols,
            rotated: work.into_matrix(),
        })
    }

    pub fn factor(&self, a: &SquareMatrix, sparsifier: Sparsifier) -> Result<DirectFactorization> {
        Ok(self.rotate(a)?.sparsify(sparsifier))
    }
}

/// Direct factorization with core size `d`.
pub fn factor_direct(a: &SquareMatrix, d: usize, sparsifier: Sparsifier, seed: u64) -> Result<DirectFactorization> {
    DirectMmf::new(d).seed(seed).factor(a, sparsifier)
}

/// `P_1 ... P_L H Q_L^T ... Q_1^T`.
pub fn reconstruct_direct(f: &DirectFactorization) -> SquareMatrix {
    unrotate(&f.h.to_matrix(), &f.left, &f.right, Exec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius_relative_error;

    #[test]
    fn sparsifier_hand_trace() {
        // 1-based (1,2,5), (2,1,4), (1,3,3) -> 0-based below; core is {3}x{3}
        let h = SquareMatrix::sparse(4, vec![(0, 1, 5.0), (1, 0, 4.0), (0, 2, 3.0), (3, 3, 9.0)]).unwrap();
        let core = IndexSet::new(4, vec![3]).unwrap();
        let top = sparsify(&h, &core, &core, Sparsifier::new(SparsifierKind::TopN, 2));
        assert_eq!(top.offcore(), &[(0, 1, 5.0), (1, 0, 4.0)]);
        let greedy = sparsify(&h, &core, &core, Sparsifier::new(SparsifierKind::GreedyTopN, 2));
        assert_eq!(greedy.offcore(), &[(0, 1, 5.0), (1, 0, 4.0)]);
        let greedy3 = sparsify(&h, &core, &core, Sparsifier::new(SparsifierKind::GreedyTopN, 3));
        // (0,2) shares row 0 with (0,1)
        assert_eq!(greedy3.offcore().len(), 2);
        let diag = sparsify(&h, &core, &core, Sparsifier::new(SparsifierKind::CoreDiagonal, 3));
        assert!(diag.offcore().is_empty());
        assert_eq!(diag.core_values(), &[9.0]);
    }

    #[test]
    fn diagonal_survives_every_sparsifier() {
        let h = SquareMatrix::dense(3, vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let core = IndexSet::new(3, vec![0]).unwrap();
        for kind in [
            SparsifierKind::CoreDiagonal,
            SparsifierKind::TopN,
            SparsifierKind::GreedyTopN,
        ] {
            let s = sparsify(&h, &core, &core, Sparsifier::default_for(kind, 3, 1));
            assert_eq!(s.to_dense(), h.to_dense());
        }
    }

    #[test]
    fn diagonal_input_is_exact() {
        let a = SquareMatrix::dense(
            4,
            vec![
                4.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0,
            ],
        )
        .unwrap();
        for d in 1..=4 {
            // rows and columns retire independently, so up to 2(n - d) diagonal entries leave the core
            let f = factor_direct(&a, d, Sparsifier::new(SparsifierKind::CoreDiagonal, usize::MAX), 5).unwrap();
            assert_eq!(f.left.len(), 4 - d);
            assert!(frobenius_relative_error(&a, &reconstruct_direct(&f)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn full_core_has_no_levels() {
        let a = SquareMatrix::dense(2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        let f = factor_direct(&a, 2, Sparsifier::new(SparsifierKind::TopN, 0), 0).unwrap();
        assert!(f.left.is_empty() && f.right.is_empty());
        assert_eq!(f.h.to_dense(), a.to_dense());
        assert!(matches!(
            factor_direct(&a, 3, Sparsifier::new(SparsifierKind::TopN, 0), 0),
            Err(MmfError::CoreSizeOutOfRange { .. })
        ));
    }
}
