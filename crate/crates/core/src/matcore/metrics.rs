use super::matrix::SquareMatrix;
use crate::error::{MmfError, Result};

/// `||A - B||_F / ||A||_F`.
pub fn frobenius_relative_error(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(MmfError::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(MmfError::ZeroMatrix);
    }
    Ok(a.sub(b)?.frobenius_norm() / norm)
}

/// Fraction of off-diagonal nonzeros `A[i][j]` whose transposed partner
/// `A[j][i]` holds exactly the same value.
///
/// Matches the "numerical symmetry" statistic of the SuiteSparse collection:
/// 1 for symmetric matrices, and 1 by convention when there are no
/// off-diagonal nonzeros at all.
pub fn numerical_symmetry(a: &SquareMatrix) -> f64 {
    let mut total = 0usize;
    let mut matched = 0usize;
    match a {
        SquareMatrix::Sparse(m) => {
            for &(r, c, v) in m.entries() {
                if r != c {
                    total += 1;
                    if m.get(c, r) == v {
                        matched += 1;
                    }
                }
            }
        }
        SquareMatrix::Dense(m) => {
            let n = m.n();
            for i in 0..n {
                for j in 0..n {
                    let v = m.get(i, j);
                    if i != j && v != 0.0 {
                        total += 1;
                        if m.get(j, i) == v {
                            matched += 1;
                        }
                    }
                }
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        matched as f64 / total as f64
    }
}

/// Splits `A` into its symmetric part `(A + A^T)/2` and skew part `(A - A^T)/2`.
///
/// Both parts are built from the same pair sums so that `S = S^T` and
/// `K = -K^T` hold exactly in floating point.
pub fn split_symmetric_skew(a: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    let n = a.n();
    match a {
        SquareMatrix::Dense(m) => {
            let mut s = vec![0.0; n * n];
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                s[i * n + i] = m.get(i, i);
                for j in (i + 1)..n {
                    let (x, y) = (m.get(i, j), m.get(j, i));
                    let sym = 0.5 * (x + y);
                    let skew = 0.5 * (x - y);
                    s[i * n + j] = sym;
                    s[j * n + i] = sym;
                    k[i * n + j] = skew;
                    k[j * n + i] = -skew;
                }
            }
            (
                SquareMatrix::dense(n, s).expect("finite input gives finite parts"),
                SquareMatrix::dense(n, k).expect("finite input gives finite parts"),
            )
        }
        SquareMatrix::Sparse(m) => {
            let mut s = Vec::new();
            let mut k = Vec::new();
            for &(r, c, x) in m.entries() {
                if r == c {
                    s.push((r, c, x));
                    continue;
                }
                let y = m.get(c, r);
                // each unordered pair is emitted once, from its first-seen member
                if r > c && y != 0.0 {
                    continue;
                }
                let (i, j, x, y) = if r < c { (r, c, x, y) } else { (c, r, y, x) };
                let sym = 0.5 * (x + y);
                let skew = 0.5 * (x - y);
                s.push((i, j, sym));
                s.push((j, i, sym));
                k.push((i, j, skew));
                k.push((j, i, -skew));
            }
            (
                SquareMatrix::sparse(n, s).expect("pairs are unique"),
                SquareMatrix::sparse(n, k).expect("pairs are unique"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        let i2 = SquareMatrix::identity(2);
        let z = SquareMatrix::sparse(2, vec![]).unwrap();
        assert_eq!(frobenius_relative_error(&i2, &i2).unwrap(), 0.0);
        assert_eq!(frobenius_relative_error(&i2, &z).unwrap(), 1.0);
        let a = SquareMatrix::dense(2, vec![3.0, 0.0, 0.0, 4.0]).unwrap();
        let b = SquareMatrix::dense(2, vec![0.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((frobenius_relative_error(&a, &b).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(frobenius_relative_error(&z, &a), Err(MmfError::ZeroMatrix));
    }

    #[test]
    fn symmetry_statistic() {
        let sym = SquareMatrix::dense(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert_eq!(numerical_symmetry(&sym), 1.0);
        let upper = SquareMatrix::dense(3, vec![0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(numerical_symmetry(&upper), 0.0);
        assert_eq!(numerical_symmetry(&SquareMatrix::identity(3)), 1.0);
    }

    #[test]
    fn symmetry_statistic_counts_nonzeros() {
        // off-diagonal nonzeros: (0,1)=1, (0,2)=2, (1,0)=1; the first and last match
        let a = SquareMatrix::dense(3, vec![0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let oracle = {
            let t = a.triplets();
            let off: Vec<_> = t.iter().filter(|e| e.0 != e.1).collect();
            let hit = off.iter().filter(|e| a.get(e.1, e.0) == e.2).count();
            hit as f64 / off.len() as f64
        };
        assert_eq!(oracle, 2.0 / 3.0);
        assert_eq!(numerical_symmetry(&a), oracle);
        assert_eq!(numerical_symmetry(&SquareMatrix::Sparse(a.to_sparse())), oracle);
    }

    #[test]
    fn split_examples() {
        let (s, k) = split_symmetric_skew(&SquareMatrix::identity(3));
        assert_eq!(s.to_dense(), SquareMatrix::identity(3).to_dense());
        assert_eq!(k.max_abs(), 0.0);

        let a = SquareMatrix::dense(2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let (s, k) = split_symmetric_skew(&a);
        assert_eq!(s.to_dense().as_slice(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(k.to_dense().as_slice(), &[0.0, 0.5, -0.5, 0.0]);

        let (s, k) = split_symmetric_skew(&SquareMatrix::Sparse(a.to_sparse()));
        assert_eq!(s.to_dense().as_slice(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(k.to_dense().as_slice(), &[0.0, 0.5, -0.5, 0.0]);
    }
}
