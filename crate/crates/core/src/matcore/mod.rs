//! Matrix primitives: storage, index sets, Givens rotations, Gram matrices
//! and error metrics.

mod givens;
mod gram;
mod index;
mod matrix;
mod metrics;

pub use givens::{apply_givens, givens_from_gram2, rotation_product, GivensRotation, Side};
pub(crate) use givens::{rotate_pair, rotate_slices};
pub use gram::{col_gram, row_gram};
pub use index::IndexSet;
pub use matrix::{CooMatrix, DenseMatrix, SquareMatrix, DENSE_FILL_LIMIT, DENSE_ORDER_LIMIT};
pub use metrics::{frobenius_relative_error, numerical_symmetry, split_symmetric_skew};
