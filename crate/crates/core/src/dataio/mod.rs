//! Matrix Market I/O, benchmark manifests and synthetic test matrices.

mod manifest;
mod mtx;
mod synth;

use serde::{Deserialize, Serialize};

pub use manifest::{parse_manifest, ManifestEntry};
pub use mtx::{parse_matrix_market, write_matrix_market};
pub use synth::{
    decay_diagonal, gen_decay_matrix, gen_mixed_spectrum, gen_random_orthogonal, random_gaussian, random_skew,
    random_sparse, random_symmetric, DecaySpec, MixedSpec,
};

/// Descriptive data carried alongside a loaded matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    pub name: String,
    pub group: String,
    pub n: usize,
    pub nnz: usize,
    pub kind: String,
    pub numerical_symmetry: f64,
}
