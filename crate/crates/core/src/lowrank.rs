//! CUR low-rank baseline and the CUR-then-MMF hybrid pipeline.
//!
//! Columns and rows are drawn without replacement with probability
//! proportional to their squared norms. The linkage matrix is
//! `U = C^+ A R^+`, with singular values below `1e-12 * sigma_max` treated as
//! zero in both pseudoinverses.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::direct::{reconstruct_direct, DirectFactorization, DirectMmf, Sparsifier, SparsifierKind};
use crate::error::{MmfError, Result};
use crate::matcore::{frobenius_relative_error, DenseMatrix, IndexSet, SquareMatrix};
use crate::storage::{cur_storage_for, solve_direct_core};

/// Relative cutoff for singular values in the pseudoinverse.
pub const PINV_RCOND: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CurFactors {
    pub n: usize,
    pub col_ids: IndexSet,
    pub row_ids: IndexSet,
    /// `n x r`: the columns of `A` at `col_ids`.
    pub c: DMatrix<f64>,
    /// `r x r`.
    pub u: DMatrix<f64>,
    /// `r x n`: the rows of `A` at `row_ids`.
    pub r: DMatrix<f64>,
}

/// Moore-Penrose pseudoinverse through the SVD.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cutoff = PINV_RCOND * smax;
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for idx in 0..k {
        let s = svd.singular_values[idx];
        if s <= cutoff || s == 0.0 {
            continue;
        }
        // out += v_idx * u_idx^T / s
        let v = vt.row(idx).transpose();
        let ut = u.column(idx).transpose();
        out += (v * ut) / s;
    }
    out
}

fn sample_by_weight(weights: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut w = weights.to_vec();
    let mut taken = vec![false; w.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let total: f64 = w.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            let mut last_positive = 0;
            for (k, &x) in w.iter().enumerate() {
                if x > 0.0 {
                    last_positive = k;
                    acc += x;
                    if acc > target {
                        pick = Some(k);
                        break;
                    }
                }
            }
            pick.unwrap_or(last_positive)
        } else {
            let free: Vec<usize> = (0..w.len()).filter(|&k| !taken[k]).collect();
            free[rng.random_range(0..free.len())]
        };
        taken[pick] = true;
        w[pick] = 0.0;
        out.push(pick);
    }
    out.sort_unstable();
    out
}

/// Row-major rows of `A` as dense vectors, one at a time.
fn for_each_row(a: &SquareMatrix, mut f: impl FnMut(usize, &[f64])) {
    let n = a.n();
    match a {
        SquareMatrix::Dense(m) => (0..n).for_each(|i| f(i, m.row(i))),
        SquareMatrix::Sparse(m) => {
            let entries = m.entries();
            let mut buf = vec![0.0; n];
            let mut k = 0;
            for i in 0..n {
                let start = k;
                while k < entries.len() && entries[k].0 == i {
                    buf[entries[k].1] = entries[k].2;
                    k += 1;
                }
                f(i, &buf);
                for e in &entries[start..k] {
                    buf[e.1] = 0.0;
                }
            }
        }
    }
}

/// CUR decomposition of rank `r`.
pub fn cur_decompose(a: &SquareMatrix, r: usize, seed: u64) -> Result<CurFactors> {
    let n = a.n();
    if r == 0 || r > n {
        return Err(MmfError::RankOutOfRange { r, n });
    }
    let mut col_w = vec![0.0; n];
    let mut row_w = vec![0.0; n];
    for (i, j, v) in a.triplets() {
        row_w[i] += v * v;
        col_w[j] += v * v;
    }
    if row_w.iter().all(|&x| x == 0.0) {
        return Err(MmfError::ZeroMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = sample_by_weight(&col_w, r, &mut rng);
    let rows = sample_by_weight(&row_w, r, &mut rng);

    let mut c = DMatrix::zeros(n, r);
    let mut rm = DMatrix::zeros(r, n);
    let col_pos: Vec<Option<usize>> = {
        let mut p = vec![None; n];
        cols.iter().enumerate().for_each(|(k, &j)| p[j] = Some(k));
        p
    };
    let row_pos: Vec<Option<usize>> = {
        let mut p = vec![None; n];
        rows.iter().enumerate().for_each(|(k, &i)| p[i] = Some(k));
        p
    };
    for (i, j, v) in a.triplets() {
        if let Some(k) = col_pos[j] {
            c[(i, k)] = v;
        }
        if let Some(k) = row_pos[i] {
            rm[(k, j)] = v;
        }
    }

    let r_pinv = pinv(&rm); // n x r
    let mut ar = DMatrix::zeros(n, r); // A R^+
    for (i, j, v) in a.triplets() {
        for k in 0..r {
            ar[(i, k)] += v * r_pinv[(j, k)];
        }
    }
    let u = pinv(&c) * ar;

    Ok(CurFactors {
        n,
        col_ids: IndexSet::new(n, cols).expect("distinct samples"),
        row_ids: IndexSet::new(n, rows).expect("distinct samples"),
        c,
        u,
        r: rm,
    })
}

impl CurFactors {
    pub fn rank(&self) -> usize {
        self.u.nrows()
    }

    /// The explicit `n x n` product `C U R`.
    pub fn product(&self) -> DenseMatrix {
        let w = &self.u * &self.r;
        let p = &self.c * w;
        DenseMatrix::from_fn(self.n, |i, j| p[(i, j)])
    }

    /// `||A - C U R||_F`, evaluated one row at a time.
    pub fn residual_norm(&self, a: &SquareMatrix) -> f64 {
        let w = &self.u * &self.r; // r x n
        let k = self.rank();
        let mut acc = 0.0;
        for_each_row(a, |i, row| {
            for (j, &x) in row.iter().enumerate() {
                let mut y = 0.0;
                for t in 0..k {
                    y += self.c[(i, t)] * w[(t, j)];
                }
                acc += (x - y) * (x - y);
            }
        });
        acc.sqrt()
    }

    pub fn relative_error(&self, a: &SquareMatrix) -> Result<f64> {
        let norm = a.frobenius_norm();
        if norm == 0.0 {
            return Err(MmfError::ZeroMatrix);
        }
        Ok(self.residual_norm(a) / norm)
    }

    pub fn storage(&self) -> u64 {
        cur_storage(self)
    }
}

/// Stored scalars: the values of `C`, `U`, `R` and one index per selected row and column.
pub fn cur_storage(f: &CurFactors) -> u64 {
    cur_storage_for(f.n, f.rank())
}

/// How the MMF stage of the hybrid is sized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HybridStage {
    /// Largest core fitting this many scalars, GreedyTopN with `m = n - d`.
    Budget(u64),
    /// Full core: the MMF stage reproduces the CUR product exactly.
    Lossless,
}

#[derive(Debug, Clone)]
pub struct HybridResult {
    pub r: usize,
    pub stage: HybridStage,
    pub core_size: usize,
    pub factor: DirectFactorization,
    /// `||A - P H Q^T||_F / ||A||_F`.
    pub error: f64,
}

/// CUR to rank `r`, then a direct factorization of the explicit product.
pub fn hybrid_compress_with(a: &SquareMatrix, r: usize, stage: HybridStage, seed: u64) -> Result<HybridResult> {
    let n = a.n();
    let cur = cur_decompose(a, r, seed)?;
    let product = SquareMatrix::Dense(cur.product());
    let factor = match stage {
        HybridStage::Budget(b) => {
            let d = solve_direct_core(n, b)?;
            DirectMmf::new(d)
                .seed(seed)
                .factor(&product, Sparsifier::default_for(SparsifierKind::GreedyTopN, n, d))?
        }
        HybridStage::Lossless => DirectMmf::new(n).seed(seed).rotate(&product)?.untruncated(),
    };
    let error = frobenius_relative_error(a, &reconstruct_direct(&factor))?;
    Ok(HybridResult {
        r,
        stage,
        core_size: factor.core_rows.len(),
        factor,
        error,
    })
}

/// Hybrid compression whose MMF stage fits in `budget` scalars.
pub fn hybrid_compress(a: &SquareMatrix, r: usize, budget: u64, seed: u64) -> Result<HybridResult> {
    hybrid_compress_with(a, r, HybridStage::Budget(budget), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let p = pinv(&m);
        // A A^+ A = A
        let back = &m * &p * &m;
        assert!((back - m).amax() < 1e-12);
    }

    #[test]
    fn diagonal_rank_one_picks_dominant() {
        let mut d = vec![0.0; 16];
        for (k, v) in [(0, 0.01), (1, 1e4), (2, 0.02), (3, 0.03)] {
            d[k * 4 + k] = v;
        }
        let a = SquareMatrix::dense(4, d).unwrap();
        let f = cur_decompose(&a, 1, 0).unwrap();
        assert_eq!(f.col_ids.as_slice(), &[1]);
        assert_eq!(f.row_ids.as_slice(), &[1]);
        let expect = (0.01f64.powi(2) + 0.02f64.powi(2) + 0.03f64.powi(2)).sqrt();
        assert!((f.residual_norm(&a) - expect).abs() < 1e-12);
    }

    #[test]
    fn range_errors() {
        let a = SquareMatrix::identity(3);
        assert!(matches!(cur_decompose(&a, 0, 0), Err(MmfError::RankOutOfRange { .. })));
        assert!(matches!(cur_decompose(&a, 4, 0), Err(MmfError::RankOutOfRange { .. })));
        let z = SquareMatrix::sparse(3, vec![]).unwrap();
        assert!(matches!(cur_decompose(&z, 1, 0), Err(MmfError::ZeroMatrix)));
    }

    #[test]
    fn sampler_never_repeats() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let picks = sample_by_weight(&[0.0, 1.0, 0.0, 5.0, 2.0], 5, &mut rng);
        assert_eq!(picks, vec![0, 1, 2, 3, 4]);
    }
}
