//! Square matrix storage: dense row-major and coordinate-sparse.

use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};

/// Matrices at or below this order are always handled densely.
pub const DENSE_ORDER_LIMIT: usize = 512;
/// Matrices whose fill fraction exceeds this are handled densely.
pub const DENSE_FILL_LIMIT: f64 = 0.10;

/// Dense `n x n` matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps a row-major buffer, rejecting non-finite values.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(MmfError::EmptyMatrix);
        }
        if data.len() != n * n {
            return Err(MmfError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(MmfError::NonFinite { row: k / n, col: k % n });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(MmfError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Mutable views of two distinct rows.
    pub(crate) fn rows_mut(&mut self, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert_ne!(i, j);
        let n = self.n;
        if i < j {
            let (lo, hi) = self.data.split_at_mut(j * n);
            (&mut lo[i * n..(i + 1) * n], &mut hi[..n])
        } else {
            let (lo, hi) = self.data.split_at_mut(i * n);
            (&mut hi[..n], &mut lo[j * n..(j + 1) * n])
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Plain triple-loop product; used for small oracles and reconstruction checks.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entry-wise `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn count_nonzeros(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }
}

/// Coordinate-format sparse square matrix.
///
/// Entries are kept sorted by `(row, col)`, unique, and free of explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(MmfError::EmptyMatrix);
        }
        for &(row, col, v) in &entries {
            if row >= n || col >= n {
                return Err(MmfError::IndexOutOfRange { row, col, n });
            }
            if !v.is_finite() {
                return Err(MmfError::NonFinite { row, col });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(MmfError::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        entries.retain(|e| e.2 != 0.0);
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(i, j), |&(r, c, _)| (r, c))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n);
        for &(r, c, v) in &self.entries {
            m.set(r, c, v);
        }
        m
    }
}

/// The operator being factorized: a real `n x n` matrix in either storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SquareMatrix {
    Dense(DenseMatrix),
    Sparse(CooMatrix),
}

impl From<DenseMatrix> for SquareMatrix {
    fn from(m: DenseMatrix) -> Self {
        SquareMatrix::Dense(m)
    }
}

impl From<CooMatrix> for SquareMatrix {
    fn from(m: CooMatrix) -> Self {
        SquareMatrix::Sparse(m)
    }
}

impl SquareMatrix {
    pub fn dense(n: usize, data: Vec<f64>) -> Result<Self> {
        DenseMatrix::from_row_major(n, data).map(Self::Dense)
    }

    pub fn sparse(n: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        CooMatrix::from_triplets(n, entries).map(Self::Sparse)
    }

    pub fn identity(n: usize) -> Self {
        Self::Dense(DenseMatrix::identity(n))
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Dense(m) => m.n(),
            Self::Sparse(m) => m.n(),
        }
    }

    /// Number of stored nonzero values.
    pub fn nnz(&self) -> usize {
        match self {
            Self::Dense(m) => m.count_nonzeros(),
            Self::Sparse(m) => m.nnz(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Dense(m) => m.get(i, j),
            Self::Sparse(m) => m.get(i, j),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Self::Sparse(_))
    }

    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        self.nnz() as f64 / (n * n)
    }

    /// Whether rotation sweeps on this matrix should run on dense storage.
    pub fn prefers_dense(&self) -> bool {
        self.n() <= DENSE_ORDER_LIMIT || self.density() > DENSE_FILL_LIMIT
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Sparse(m) => m.to_dense(),
        }
    }

    /// Nonzero triplets in `(row, col)` order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        match self {
            Self::Sparse(m) => m.entries().to_vec(),
            Self::Dense(m) => {
                let n = m.n();
                let mut out = Vec::new();
                for i in 0..n {
                    for (j, &v) in m.row(i).iter().enumerate() {
                        if v != 0.0 {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn to_sparse(&self) -> CooMatrix {
        match self {
            Self::Sparse(m) => m.clone(),
            Self::Dense(m) => CooMatrix {
                n: m.n(),
                entries: self.triplets(),
            },
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            Self::Dense(m) => Self::Dense(m.transpose()),
            Self::Sparse(m) => {
                let mut entries: Vec<_> = m.entries().iter().map(|&(r, c, v)| (c, r, v)).collect();
                entries.sort_by_key(|&(r, c, _)| (r, c));
                Self::Sparse(CooMatrix { n: m.n(), entries })
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            Self::Dense(m) => m.frobenius_norm(),
            Self::Sparse(m) => m.entries().iter().map(|e| e.2 * e.2).sum::<f64>().sqrt(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Dense(m) => m.max_abs(),
            Self::Sparse(m) => m.entries().iter().fold(0.0, |a, e| a.max(e.2.abs())),
        }
    }

    /// Entry-wise linear combination `alpha * self + beta * other`.
    pub(crate) fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(MmfError::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        match (self, other) {
            (Self::Sparse(a), Self::Sparse(b)) => {
                let mut out = Vec::with_capacity(a.nnz() + b.nnz());
                let (ea, eb) = (a.entries(), b.entries());
                let (mut p, mut q) = (0, 0);
                while p < ea.len() || q < eb.len() {
                    let ka = ea.get(p).map(|e| (e.0, e.1));
                    let kb = eb.get(q).map(|e| (e.0, e.1));
                    let (key, v) = match (ka, kb) {
                        (Some(x), Some(y)) if x == y => {
                            p += 1;
                            q += 1;
                            (x, alpha * ea[p - 1].2 + beta * eb[q - 1].2)
                        }
                        (Some(x), Some(y)) if x < y => {
                            p += 1;
                            (x, alpha * ea[p - 1].2)
                        }
                        (Some(x), None) => {
                            p += 1;
                            (x, alpha * ea[p - 1].2)
                        }
                        (_, Some(y)) => {
                            q += 1;
                            (y, beta * eb[q - 1].2)
                        }
                        (None, None) => unreachable!(),
                    };
                    if v != 0.0 {
                        out.push((key.0, key.1, v));
                    }
                }
                Ok(Self::Sparse(CooMatrix { n: a.n(), entries: out }))
            }
            _ => {
                let (a, b) = (self.to_dense(), other.to_dense());
                let data = a
                    .as_slice()
                    .iter()
                    .zip(b.as_slice())
                    .map(|(x, y)| alpha * x + beta * y)
                    .collect();
                Ok(Self::Dense(DenseMatrix { n: a.n(), data }))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(m) => m.mul_vec(x),
            Self::Sparse(m) => {
                let mut y = vec![0.0; m.n()];
                for &(r, c, v) in m.entries() {
                    y[r] += v * x[c];
                }
                y
            }
        }
    }

    /// `max |A - s * A^T|`, with `s = 1` for symmetry and `s = -1` for skewness.
    pub(crate) fn transpose_defect(&self, sign: f64) -> f64 {
        match self {
            Self::Dense(m) => {
                let n = m.n();
                let mut d: f64 = 0.0;
                for i in 0..n {
                    for j in i..n {
                        d = d.max((m.get(i, j) - sign * m.get(j, i)).abs());
                    }
                }
                d
            }
            Self::Sparse(m) => m
                .entries()
                .iter()
                .fold(0.0, |d, &(r, c, v)| d.max((v - sign * m.get(c, r)).abs())),
        }
    }
}
