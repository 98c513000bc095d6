//! Givens rotations: construction from a 2x2 Gram block and application.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::matrix::{CooMatrix, DenseMatrix, SquareMatrix};
use crate::error::{MmfError, Result};

/// Rotation in the `(i, j)` coordinate plane of `R^n`.
///
/// The implied matrix `G` equals the identity except
/// `G[i][i] = G[j][j] = cos(theta)`, `G[i][j] = -sin(theta)`, `G[j][i] = sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GivensRotation {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub n: usize,
}

/// Which side of the operand a rotation multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `G^T A`: mixes rows `i` and `j`.
    LeftTranspose,
    /// `A G`: mixes columns `i` and `j`.
    Right,
}

impl GivensRotation {
    pub fn new(i: usize, j: usize, theta: f64, n: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(MmfError::IndexOutOfRange { row: i, col: j, n });
        }
        if i == j {
            return Err(MmfError::InvalidIndexSet(format!(
                "rotation plane ({i}, {j}) is degenerate"
            )));
        }
        if !theta.is_finite() {
            return Err(MmfError::NonFinite { row: i, col: j });
        }
        Ok(Self { i, j, theta, n })
    }

    #[inline]
    pub fn cos_sin(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (c, s)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut g = DenseMatrix::identity(self.n);
        let (c, s) = self.cos_sin();
        g.set(self.i, self.i, c);
        g.set(self.j, self.j, c);
        g.set(self.i, self.j, -s);
        g.set(self.j, self.i, s);
        g
    }

    pub fn inverse(&self) -> Self {
        Self {
            theta: -self.theta,
            ..*self
        }
    }
}

/// `(a, b) <- (c a + s b, -s a + c b)`: the pair update shared by `G^T A` on rows
/// and `A G` on columns.
#[inline(always)]
pub(crate) fn rotate_pair(a: f64, b: f64, c: f64, s: f64) -> (f64, f64) {
    (c * a + s * b, -s * a + c * b)
}

#[inline]
pub(crate) fn rotate_slices(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (na, nb) = rotate_pair(*a, *b, c, s);
        *a = na;
        *b = nb;
    }
}

/// Angle of the rotation that diagonalizes `[[g_ii, g_ij], [g_ij, g_jj]]`.
///
/// The result lies in `(-pi/4, pi/4]`; `g_ij == 0` gives exactly zero.
pub fn givens_from_gram2(g_ii: f64, g_ij: f64, g_jj: f64) -> f64 {
    if g_ij == 0.0 {
        return 0.0;
    }
    let diff = g_ii - g_jj;
    if diff == 0.0 {
        return FRAC_PI_4;
    }
    // tan(2 theta) = 2 g_ij / (g_ii - g_jj)
    let theta = 0.5 * (2.0 * g_ij / diff).atan();
    if theta <= -FRAC_PI_4 {
        FRAC_PI_4
    } else {
        theta
    }
}

pub(crate) fn rotate_dense(m: &mut DenseMatrix, g: &GivensRotation, side: Side) {
    let (c, s) = g.cos_sin();
    match side {
        Side::LeftTranspose => {
            let (ri, rj) = m.rows_mut(g.i, g.j);
            rotate_slices(ri, rj, c, s);
        }
        Side::Right => {
            let n = m.n();
            let data = m.as_mut_slice();
            for r in 0..n {
                let (a, b) = (data[r * n + g.i], data[r * n + g.j]);
                let (na, nb) = rotate_pair(a, b, c, s);
                data[r * n + g.i] = na;
                data[r * n + g.j] = nb;
            }
        }
    }
}

fn rotate_sparse(m: &CooMatrix, g: &GivensRotation, side: Side) -> CooMatrix {
    let (c, s) = g.cos_sin();
    // (other coordinate) -> (value on i, value on j)
    let mut pairs: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut rest = Vec::with_capacity(m.nnz() + 4);
    for &(r, col, v) in m.entries() {
        let (line, other) = match side {
            Side::LeftTranspose => (r, col),
            Side::Right => (col, r),
        };
        if line == g.i {
            pairs.entry(other).or_default().0 = v;
        } else if line == g.j {
            pairs.entry(other).or_default().1 = v;
        } else {
            rest.push((r, col, v));
        }
    }
    for (other, (a, b)) in pairs {
        let (na, nb) = rotate_pair(a, b, c, s);
        for (line, v) in [(g.i, na), (g.j, nb)] {
            if v != 0.0 {
                match side {
                    Side::LeftTranspose => rest.push((line, other, v)),
                    Side::Right => rest.push((other, line, v)),
                }
            }
        }
    }
    CooMatrix::from_triplets(m.n(), rest).expect("rotation preserves coordinate validity")
}

/// Applies `G^T A` or `A G`, returning a new matrix in the same storage.
pub fn apply_givens(a: &SquareMatrix, g: &GivensRotation, side: Side) -> Result<SquareMatrix> {
    if g.n != a.n() {
        return Err(MmfError::DimensionMismatch {
            expected: a.n(),
            got: g.n,
        });
    }
    Ok(match a {
        SquareMatrix::Dense(m) => {
            let mut out = m.clone();
            rotate_dense(&mut out, g, side);
            SquareMatrix::Dense(out)
        }
        SquareMatrix::Sparse(m) => SquareMatrix::Sparse(rotate_sparse(m, g, side)),
    })
}

/// Dense product `G_1 G_2 ... G_L` of a rotation sequence.
pub fn rotation_product(n: usize, rotations: &[GivensRotation]) -> DenseMatrix {
    let mut p = DenseMatrix::identity(n);
    for g in rotations {
        rotate_dense(&mut p, g, Side::Right);
    }
    p
}
