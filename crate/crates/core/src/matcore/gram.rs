use super::index::IndexSet;
use super::matrix::{DenseMatrix, SquareMatrix};
use crate::error::{MmfError, Result};

fn check_set(a: &SquareMatrix, s: &IndexSet) -> Result<()> {
    if s.is_empty() {
        return Err(MmfError::EmptyIndexSet);
    }
    if s.universe() != a.n() {
        return Err(MmfError::DimensionMismatch {
            expected: a.n(),
            got: s.universe(),
        });
    }
    Ok(())
}

/// Gram matrix of the selected rows of `A`, restricted to the selected columns.
///
/// Entry `(a, b)` is `<A[rows[a], cols], A[rows[b], cols]>`.
pub fn row_gram(a: &SquareMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix> {
    check_set(a, rows)?;
    check_set(a, cols)?;
    let k = rows.len();
    // gather the restricted rows as dense vectors
    let sub: Vec<Vec<f64>> = match a {
        SquareMatrix::Dense(m) => rows
            .iter()
            .map(|r| cols.iter().map(|c| m.get(r, c)).collect())
            .collect(),
        SquareMatrix::Sparse(m) => {
            let mut pos_row = vec![usize::MAX; a.n()];
            for (p, r) in rows.iter().enumerate() {
                pos_row[r] = p;
            }
            let mut pos_col = vec![usize::MAX; a.n()];
            for (p, c) in cols.iter().enumerate() {
                pos_col[c] = p;
            }
            let mut out = vec![vec![0.0; cols.len()]; k];
            for &(r, c, v) in m.entries() {
                if pos_row[r] != usize::MAX && pos_col[c] != usize::MAX {
                    out[pos_row[r]][pos_col[c]] = v;
                }
            }
            out
        }
    };
    let mut g = DenseMatrix::zeros(k);
    for x in 0..k {
        for y in x..k {
            let v: f64 = sub[x].iter().zip(&sub[y]).map(|(p, q)| p * q).sum();
            g.set(x, y, v);
            g.set(y, x, v);
        }
    }
    Ok(g)
}

/// Gram matrix of the selected columns, restricted to the selected rows.
pub fn col_gram(a: &SquareMatrix, cols: &IndexSet, rows: &IndexSet) -> Result<DenseMatrix> {
    row_gram(&a.transpose(), cols, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gram_is_identity() {
        let a = SquareMatrix::identity(4);
        let all = IndexSet::full(4);
        assert_eq!(row_gram(&a, &all, &all).unwrap(), DenseMatrix::identity(4));
    }

    #[test]
    fn identical_rows_give_flat_block() {
        let a = SquareMatrix::dense(3, vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 0.0, 1.0, 0.0]).unwrap();
        let rows = IndexSet::new(3, vec![0, 1]).unwrap();
        let g = row_gram(&a, &rows, &IndexSet::full(3)).unwrap();
        assert_eq!(g.get(0, 0), 14.0);
        assert_eq!(g.get(0, 1), 14.0);
        assert_eq!(g.get(1, 1), 14.0);
    }

    #[test]
    fn empty_sets_rejected() {
        let a = SquareMatrix::identity(2);
        assert_eq!(
            row_gram(&a, &IndexSet::empty(2), &IndexSet::full(2)),
            Err(MmfError::EmptyIndexSet)
        );
    }
}
