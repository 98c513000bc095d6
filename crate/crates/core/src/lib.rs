//! Multiresolution matrix factorization for general square matrices.
//!
//! Symmetric and skew-symmetric inputs are factored by greedy Givens
//! conjugation ([`sym`], [`skew`]); arbitrary inputs either through their
//! symmetric/skew split ([`additive`]) or a direct two-sided factorization
//! with independent left and right rotations ([`direct`]). [`lowrank`] holds
//! the CUR baseline and the CUR-then-MMF hybrid, and [`storage`] the common
//! scalar-count ruler used to compare them under a budget.

pub mod additive;
pub mod core_sparse;
pub mod dataio;
pub mod direct;
pub mod error;
pub mod exec;
mod greedy;
pub mod lowrank;
pub mod matcore;
pub mod skew;
pub mod storage;
pub mod sym;
mod work;

pub use additive::{factor_additive, reconstruct_additive, AdditiveFactorization, AdditiveMmf};
pub use core_sparse::CoreSparse;
pub use direct::{
    factor_direct, reconstruct_direct, sparsify, DirectFactorization, DirectMmf, DirectRotation, Sparsifier,
    SparsifierKind,
};
pub use error::{MmfError, Result};
pub use exec::Exec;
pub use lowrank::{
    cur_decompose, cur_storage, hybrid_compress, hybrid_compress_with, CurFactors, HybridResult, HybridStage,
};
pub use matcore::{DenseMatrix, IndexSet, SquareMatrix};
pub use skew::{factor_skew, murnaghan_sparsify, reconstruct_skew, SkewFactorization, SkewMmf};
pub use storage::{Accounting, StorageBudget};
pub use sym::{factor_symmetric, reconstruct_sym, SymFactorization, SymmetricMmf};
