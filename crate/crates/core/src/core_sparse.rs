//! The middle factor `H`: a dense core block plus a sparse off-core entry list.

use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};
use crate::matcore::{DenseMatrix, IndexSet, SquareMatrix, DENSE_ORDER_LIMIT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreSparse {
    n: usize,
    core_rows: IndexSet,
    core_cols: IndexSet,
    /// `|core_rows| x |core_cols|`, row-major in set order.
    core_values: Vec<f64>,
    /// Sorted, unique, and never inside the core block.
    offcore: Vec<(usize, usize, f64)>,
}

impl CoreSparse {
    pub fn new(
        core_rows: IndexSet,
        core_cols: IndexSet,
        core_values: Vec<f64>,
        mut offcore: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let n = core_rows.universe();
        if core_cols.universe() != n {
            return Err(MmfError::DimensionMismatch {
                expected: n,
                got: core_cols.universe(),
            });
        }
        let expected = core_rows.len() * core_cols.len();
        if core_values.len() != expected {
            return Err(MmfError::DimensionMismatch {
                expected,
                got: core_values.len(),
            });
        }
        offcore.sort_by_key(|&(r, c, _)| (r, c));
        for w in offcore.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(MmfError::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }
        for &(r, c, v) in &offcore {
            if r >= n || c >= n {
                return Err(MmfError::IndexOutOfRange { row: r, col: c, n });
            }
            if core_rows.contains(r) && core_cols.contains(c) {
                return Err(MmfError::InvalidIndexSet(format!(
                    "off-core entry ({r}, {c}) lies in the core block"
                )));
            }
            if !v.is_finite() {
                return Err(MmfError::NonFinite { row: r, col: c });
            }
        }
        Ok(Self {
            n,
            core_rows,
            core_cols,
            core_values,
            offcore,
        })
    }

    /// Splits `m` into its core block and the list of nonzero off-core candidates.
    pub(crate) fn split(
        m: &SquareMatrix,
        core_rows: &IndexSet,
        core_cols: &IndexSet,
    ) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
        let n = m.n();
        let (nr, nc) = (core_rows.len(), core_cols.len());
        let mut pos_r = vec![usize::MAX; n];
        for (p, r) in core_rows.iter().enumerate() {
            pos_r[r] = p;
        }
        let mut pos_c = vec![usize::MAX; n];
        for (p, c) in core_cols.iter().enumerate() {
            pos_c[c] = p;
        }
        let mut core = vec![0.0; nr * nc];
        let mut off = Vec::new();
        let mut visit = |r: usize, c: usize, v: f64| {
            if pos_r[r] != usize::MAX && pos_c[c] != usize::MAX {
                core[pos_r[r] * nc + pos_c[c]] = v;
            } else {
                off.push((r, c, v));
            }
        };
        match m {
            SquareMatrix::Dense(d) => {
                for r in 0..n {
                    for (c, &v) in d.row(r).iter().enumerate() {
                        if v != 0.0 {
                            visit(r, c, v);
                        }
                    }
                }
            }
            SquareMatrix::Sparse(s) => {
                for &(r, c, v) in s.entries() {
                    visit(r, c, v);
                }
            }
        }
        (core, off)
    }

    /// Keeps every entry of `m`: the untruncated middle factor.
    pub fn lossless(m: &SquareMatrix, core_rows: &IndexSet, core_cols: &IndexSet) -> Self {
        let (core, off) = Self::split(m, core_rows, core_cols);
        Self::new(core_rows.clone(), core_cols.clone(), core, off).expect("split output is consistent")
    }

    /// `S`-core-diagonal truncation: the core block plus the off-core diagonal.
    pub fn core_diagonal(m: &SquareMatrix, core: &IndexSet) -> Self {
        let (block, off) = Self::split(m, core, core);
        let diag = off.into_iter().filter(|e| e.0 == e.1).collect();
        Self::new(core.clone(), core.clone(), block, diag).expect("split output is consistent")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn core_rows(&self) -> &IndexSet {
        &self.core_rows
    }

    pub fn core_cols(&self) -> &IndexSet {
        &self.core_cols
    }

    pub fn core_values(&self) -> &[f64] {
        &self.core_values
    }

    pub fn offcore(&self) -> &[(usize, usize, f64)] {
        &self.offcore
    }

    /// Core value at set positions `(p, q)`.
    pub fn core_at(&self, p: usize, q: usize) -> f64 {
        self.core_values[p * self.core_cols.len() + q]
    }

    /// Squared Frobenius norm of everything stored.
    pub fn mass2(&self) -> f64 {
        self.core_values.iter().map(|v| v * v).sum::<f64>() + self.offcore.iter().map(|e| e.2 * e.2).sum::<f64>()
    }

    /// Scalars needed to store this factor: core values, three per off-core
    /// entry, and one per core index (shared when rows and columns coincide).
    pub fn storage(&self) -> u64 {
        let index = if self.core_rows == self.core_cols {
            self.core_rows.len()
        } else {
            self.core_rows.len() + self.core_cols.len()
        };
        (self.core_values.len() + 3 * self.offcore.len() + index) as u64
    }

    /// The implied `n x n` matrix.
    pub fn to_matrix(&self) -> SquareMatrix {
        let nc = self.core_cols.len();
        let mut entries = Vec::with_capacity(self.core_values.len() + self.offcore.len());
        for (p, r) in self.core_rows.iter().enumerate() {
            for (q, c) in self.core_cols.iter().enumerate() {
                let v = self.core_values[p * nc + q];
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        entries.extend_from_slice(&self.offcore);
        let sparse = SquareMatrix::sparse(self.n, entries).expect("core and off-core are disjoint");
        if self.n <= DENSE_ORDER_LIMIT {
            SquareMatrix::Dense(sparse.to_dense())
        } else {
            sparse
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.to_matrix().to_dense()
    }

    /// Copy with every value set to zero, keeping the structure.
    pub fn zeroed(&self) -> Self {
        Self {
            core_values: vec![0.0; self.core_values.len()],
            offcore: Vec::new(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_diagonal_keeps_block_and_diagonal() {
        let m = SquareMatrix::dense(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]).unwrap();
        let core = IndexSet::new(3, vec![0, 2]).unwrap();
        let h = CoreSparse::core_diagonal(&m, &core);
        assert_eq!(h.core_values(), &[1.0, 3.0, 7.0, 9.0]);
        assert_eq!(h.offcore(), &[(1, 1, 5.0)]);
        assert_eq!(h.storage(), 4 + 3 + 2);
        let back = h.to_dense();
        assert_eq!(back.get(0, 1), 0.0);
        assert_eq!(back.get(2, 0), 7.0);
    }

    #[test]
    fn rejects_offcore_inside_core() {
        let core = IndexSet::new(2, vec![0]).unwrap();
        assert!(CoreSparse::new(core.clone(), core, vec![1.0], vec![(0, 0, 2.0)]).is_err());
    }

    #[test]
    fn lossless_roundtrip() {
        let m = SquareMatrix::dense(3, vec![1.0, 2.0, 0.0, 4.0, 5.0, 6.0, 0.0, 8.0, 9.0]).unwrap();
        let rows = IndexSet::new(3, vec![1]).unwrap();
        let cols = IndexSet::new(3, vec![2, 0]).unwrap();
        let h = CoreSparse::lossless(&m, &rows, &cols);
        assert_eq!(h.core_values(), &[6.0, 4.0]);
        assert_eq!(h.to_dense(), m.to_dense());
    }
}
