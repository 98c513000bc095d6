//! Checks against independently computed reference values.

use approx::assert_relative_eq;
use mmf_core::dataio::{
    decay_diagonal, gen_decay_matrix, gen_random_orthogonal, random_gaussian, random_skew, random_symmetric, DecaySpec,
};
use mmf_core::matcore::{frobenius_relative_error, numerical_symmetry, rotation_product};
use mmf_core::storage::{cur_storage_for, direct_storage, solve_direct_core, solve_sym_core, sym_storage};
use mmf_core::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn to_na(a: &SquareMatrix) -> DMatrix<f64> {
    let d = a.to_dense();
    DMatrix::from_row_slice(d.n(), d.n(), d.as_slice())
}

fn max_abs_identity_defect(q: &DenseMatrix) -> f64 {
    let qtq = q.transpose().matmul(q);
    let n = q.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (qtq.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

#[test]
fn decay_matrix_spectrum_matches_diagonal() {
    for (n, t) in [(16, 1.0), (40, 4.0), (64, 10.0)] {
        let a = gen_decay_matrix(DecaySpec { n, t, seed: 3 }).unwrap();
        let mut eig: Vec<f64> = to_na(&a).symmetric_eigen().eigenvalues.iter().copied().collect();
        let mut want = decay_diagonal(n, t).unwrap();
        eig.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (x, y) in eig.iter().zip(&want) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
        let d = a.to_dense();
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (d.get(i, j) - d.get(j, i)).abs())
            .fold(0.0, f64::max);
        assert!(asym <= 1e-13);
    }
}

#[test]
fn random_orthogonal_is_orthogonal_and_deterministic() {
    let q = gen_random_orthogonal(50, 9);
    assert!(max_abs_identity_defect(&q.to_dense()) <= 1e-12);
    assert_eq!(q, gen_random_orthogonal(50, 9));
    assert_ne!(q, gen_random_orthogonal(50, 10));
}

#[test]
fn block_eigenbasis_is_recovered_exactly() {
    // Q = blockdiag(R(a), R(b)) with eigenvalues (5, 0.1) and (4, 0.05)
    let (a, b) = (0.4f64, 1.1f64);
    let block = |t: f64, l1: f64, l2: f64| {
        let (c, s) = (t.cos(), t.sin());
        [c * c * l1 + s * s * l2, c * s * (l1 - l2), s * s * l1 + c * c * l2]
    };
    let x = block(a, 5.0, 0.1);
    let y = block(b, 4.0, 0.05);
    #[rustfmt::skip]
    let m = SquareMatrix::dense(4, vec![
        x[0], x[1], 0.0, 0.0,
        x[1], x[2], 0.0, 0.0,
        0.0, 0.0, y[0], y[1],
        0.0, 0.0, y[1], y[2],
    ]).unwrap();
    for seed in 0..8 {
        let f = factor_symmetric(&m, 2, seed).unwrap();
        assert_eq!(f.rotations.len(), 2);
        assert!(frobenius_relative_error(&m, &reconstruct_sym(&f)).unwrap() < 1e-12);
    }
}

fn low_rank(n: usize, r: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::<f64>::from_fn(n, r, |_, _| rng.sample(StandardNormal));
    let y = DMatrix::<f64>::from_fn(n, r, |_, _| rng.sample(StandardNormal));
    let p = x * y.transpose();
    SquareMatrix::dense(n, (0..n * n).map(|k| p[(k / n, k % n)]).collect()).unwrap()
}

fn exact_cur_error(a: &SquareMatrix, r: usize) -> f64 {
    // resample when the draw misses the column or row space
    (0..20)
        .map(|s| cur_decompose(a, r, s).unwrap().relative_error(a).unwrap())
        .find(|&e| e <= 1e-8)
        .unwrap_or(f64::INFINITY)
}

#[test]
fn cur_recovers_exact_low_rank() {
    for r in [3, 8] {
        for seed in 0..5 {
            let a = low_rank(100, r, seed);
            assert!(exact_cur_error(&a, r) <= 1e-8);
        }
    }
}

#[test]
fn cur_full_rank_is_exact() {
    let a = random_gaussian(20, 4);
    let f = cur_decompose(&a, 20, 0).unwrap();
    assert!(f.relative_error(&a).unwrap() <= 1e-9);
}

#[test]
fn cur_linkage_matches_pseudoinverse_route() {
    let a = random_gaussian(30, 2);
    let f = cur_decompose(&a, 6, 1).unwrap();
    let na = to_na(&a);
    let cc = &f.c * f.c.clone().pseudo_inverse(1e-12).unwrap();
    let rr = f.r.clone().pseudo_inverse(1e-12).unwrap() * &f.r;
    let alt = cc * &na * rr;
    let cur = &f.c * &f.u * &f.r;
    assert!((cur - alt).norm() <= 1e-9 * na.norm());
    for (k, j) in f.col_ids.iter().enumerate() {
        assert_eq!(f.c.column(k), na.column(j));
    }
    for (k, i) in f.row_ids.iter().enumerate() {
        assert_eq!(f.r.row(k), na.row(i));
    }
}

#[test]
fn hybrid_lossless_stage_matches_cur() {
    let a = random_gaussian(24, 5);
    for r in [3, 10] {
        let h = hybrid_compress_with(&a, r, HybridStage::Lossless, 2).unwrap();
        let cur = cur_decompose(&a, r, 2).unwrap().relative_error(&a).unwrap();
        assert!((h.error - cur).abs() <= 1e-10);
    }
    let h = hybrid_compress_with(&a, 24, HybridStage::Lossless, 2).unwrap();
    assert!(h.error < 1e-9);
}

#[test]
fn hybrid_with_exact_cur_equals_mmf_alone() {
    let a = random_gaussian(24, 6);
    let budget = 300;
    let h = hybrid_compress(&a, 24, budget, 2).unwrap();
    let d = solve_direct_core(24, budget).unwrap();
    let f = factor_direct(&a, d, Sparsifier::default_for(SparsifierKind::GreedyTopN, 24, d), 2).unwrap();
    let e = frobenius_relative_error(&a, &reconstruct_direct(&f)).unwrap();
    assert!((h.error - e).abs() <= 1e-9, "{} vs {e}", h.error);
}

#[test]
fn storage_counts() {
    assert_eq!(sym_storage(10, 10), 110);
    assert_eq!(cur_storage_for(10, 2), 48);
    assert_eq!(cur_storage_for(10, 0), 0);
    let a = random_symmetric(10, 1);
    let f = factor_symmetric(&a, 10, 0).unwrap();
    assert_eq!(f.storage(), 110);
    let f9 = factor_symmetric(&a, 9, 0).unwrap();
    assert!(f9.storage() <= sym_storage(10, 9));
    assert_eq!(solve_sym_core(10, 110).unwrap(), 10);
    let g = factor_direct(
        &random_gaussian(12, 0),
        5,
        Sparsifier::default_for(SparsifierKind::TopN, 12, 5),
        0,
    )
    .unwrap();
    assert_eq!(g.storage(), direct_storage(12, 5, 7));
}

#[test]
fn additive_storage_is_sum_of_halves() {
    let a = random_gaussian(30, 8);
    let f = factor_additive(&a, 900, 1).unwrap();
    let (s, k) = (f.sym.as_ref().unwrap(), f.skew.as_ref().unwrap());
    assert_eq!(f.storage(), s.storage() + k.storage());
    assert!(f.storage() <= 900);
}

#[test]
fn additive_of_symmetric_is_symmetric_mmf() {
    let a = random_symmetric(20, 3);
    let f = factor_additive(&a, 300, 4).unwrap();
    assert!(f.skew.is_none());
    let d = solve_sym_core(20, 300).unwrap();
    let g = factor_symmetric(&a, d, 4).unwrap();
    assert_eq!(f.sym.as_ref().unwrap(), &g);
}

#[test]
fn skew_rotations_are_orthogonal() {
    let k = random_skew(32, 1);
    let f = factor_skew(&k, 4, 2).unwrap();
    let q = rotation_product(32, &f.rotations);
    assert!(max_abs_identity_defect(&q) <= 1e-11);
}

#[test]
fn numerical_symmetry_counts_matched_pairs() {
    // off-diagonal nonzeros (0,1)=1, (0,2)=2, (1,0)=1: two of three are matched
    let a = SquareMatrix::dense(3, vec![0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert_relative_eq!(numerical_symmetry(&a), 2.0 / 3.0);
    assert_eq!(numerical_symmetry(&random_symmetric(8, 0)), 1.0);
    assert_eq!(numerical_symmetry(&SquareMatrix::identity(4)), 1.0);
}
