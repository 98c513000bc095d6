use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};
use crate::matcore::{CooMatrix, DenseMatrix, SquareMatrix};

/// Parameters of a `Q D Q^T` test matrix with a prescribed spectral decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub n: usize,
    pub t: f64,
    pub seed: u64,
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n * n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Seeded random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn gen_random_orthogonal(n: usize, seed: u64) -> SquareMatrix {
    assert!(n >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_row_slice(n, n, &gaussian(n, &mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    SquareMatrix::Dense(DenseMatrix::from_fn(n, |i, j| q[(i, j)]))
}

/// Diagonal `D_kk = (1 - e^{t (x_k - 1)}) / (1 - e^t)` with `x_k = k / (n - 1)`.
pub fn decay_diagonal(n: usize, t: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(MmfError::InvalidDecay(format!("n = {n} must be at least 2")));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(MmfError::InvalidDecay(format!("t = {t} must be finite and positive")));
    }
    let denom = 1.0 - t.exp();
    Ok((0..n)
        .map(|k| {
            let x = k as f64 / (n - 1) as f64;
            (1.0 - (t * (x - 1.0)).exp()) / denom
        })
        .collect())
}

/// `Q D Q^T` with `Q = gen_random_orthogonal(n, seed)` and `D` from [`decay_diagonal`].
pub fn gen_decay_matrix(spec: DecaySpec) -> Result<SquareMatrix> {
    let d = decay_diagonal(spec.n, spec.t)?;
    let n = spec.n;
    let q = gen_random_orthogonal(n, spec.seed).to_dense();
    let qd = DenseMatrix::from_fn(n, |i, k| q.get(i, k) * d[k]);
    let m = qd.matmul(&q.transpose());
    Ok(SquareMatrix::Dense(DenseMatrix::from_fn(n, |i, j| {
        0.5 * (m.get(i, j) + m.get(j, i))
    })))
}

/// Dense matrix of independent standard normal entries.
pub fn random_gaussian(n: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SquareMatrix::Dense(DenseMatrix::from_row_major(n, gaussian(n, &mut rng)).expect("finite samples"))
}

/// `(G + G^T) / 2` for a Gaussian `G`.
pub fn random_symmetric(n: usize, seed: u64) -> SquareMatrix {
    let g = random_gaussian(n, seed).to_dense();
    SquareMatrix::Dense(DenseMatrix::from_fn(n, |i, j| 0.5 * (g.get(i, j) + g.get(j, i))))
}

/// `(G - G^T) / 2` for a Gaussian `G`.
pub fn random_skew(n: usize, seed: u64) -> SquareMatrix {
    let g = random_gaussian(n, seed).to_dense();
    SquareMatrix::Dense(DenseMatrix::from_fn(n, |i, j| 0.5 * (g.get(i, j) - g.get(j, i))))
}

/// Sparse matrix with a nonzero diagonal plus `per_row` off-diagonal Gaussian
/// entries per row at uniformly random columns.
pub fn random_sparse(n: usize, per_row: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(n * (per_row + 1));
    for i in 0..n {
        let mut cols = vec![i];
        let want = per_row.min(n - 1);
        while cols.len() < want + 1 {
            let j = rng.random_range(0..n);
            if !cols.contains(&j) {
                cols.push(j);
            }
        }
        for j in cols {
            let v: f64 = rng.sample(StandardNormal);
            entries.push((i, j, if v == 0.0 { 1.0 } else { v }));
        }
    }
    SquareMatrix::Sparse(CooMatrix::from_triplets(n, entries).expect("valid triplets"))
}

/// A low-rank dense part plus nested constant diagonal blocks plus noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedSpec {
    pub n: usize,
    pub rank: usize,
    /// Scale of the `rank`-term component.
    pub low_rank: f64,
    /// Weight ratio between consecutive block levels (level 0 = one `n x n` block).
    pub block_decay: f64,
    /// Smallest block size; levels halve the block size down to this.
    pub min_block: usize,
    pub noise: f64,
    pub seed: u64,
}

impl MixedSpec {
    /// The 128 x 128 rank-4 reference matrix used by the rank sweep.
    pub fn reference() -> Self {
        Self {
            n: 128,
            rank: 4,
            low_rank: 3.0,
            block_decay: 1.3,
            min_block: 4,
            noise: 0.1,
            seed: 7,
        }
    }
}

/// `low_rank * X Y^T / sqrt(n)` with Gaussian `n x rank` factors, plus for each
/// level `l` the block-diagonal matrix of `n / 2^l`-sized constant blocks with
/// Gaussian values weighted by `block_decay^l`, plus i.i.d. Gaussian noise.
pub fn gen_mixed_spectrum(spec: MixedSpec) -> SquareMatrix {
    let MixedSpec { n, rank, .. } = spec;
    assert!(
        n >= 1 && spec.min_block >= 1,
        "dimension and block size must be positive"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x: Vec<f64> = (0..n * rank).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = (0..n * rank).map(|_| rng.sample(StandardNormal)).collect();
    let scale = spec.low_rank / (n as f64).sqrt();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = scale * (0..rank).map(|k| x[i * rank + k] * y[j * rank + k]).sum::<f64>();
        }
    }
    let (mut size, mut weight) = (n, 1.0);
    while size >= spec.min_block {
        for b in 0..n / size {
            let v: f64 = rng.sample(StandardNormal);
            for i in b * size..(b + 1) * size {
                for j in b * size..(b + 1) * size {
                    m[i * n + j] += weight * v;
                }
            }
        }
        size /= 2;
        weight *= spec.block_decay;
    }
    for v in m.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += spec.noise * z;
    }
    SquareMatrix::Dense(DenseMatrix::from_row_major(n, m).expect("finite samples"))
}
