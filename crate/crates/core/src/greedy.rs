//! Greedy Jacobi-style conjugation shared by the symmetric and skew paths,
//! and the rotation-undo step shared by every reconstruction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::matcore::{givens_from_gram2, GivensRotation, IndexSet, SquareMatrix};
use crate::work::Work;

pub(crate) struct ConjugationRun {
    pub rotations: Vec<GivensRotation>,
    pub retired: Vec<usize>,
    pub active: IndexSet,
    pub rotated: SquareMatrix,
}

/// Off-diagonal energy of row `t` over the active set.
fn offdiag_residual(work: &Work, t: usize, active: &IndexSet) -> f64 {
    (work.row_norm2(t, active) - work.get(t, t).powi(2)).max(0.0)
}

/// Runs `A <- G^T A G` level by level until `max(stop, 1)` indices remain
/// active. With `stop == 0` the final index is retired without a rotation.
///
/// `observe` sees the workspace after every level.
pub(crate) fn greedy_conjugation<F>(
    a: &SquareMatrix,
    stop: usize,
    seed: u64,
    exec: Exec,
    mut observe: F,
) -> ConjugationRun
where
    F: FnMut(usize, &Work),
{
    let n = a.n();
    let mut work = Work::new(a, exec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut active = IndexSet::full(n);
    let mut rotations = Vec::with_capacity(n.saturating_sub(stop));
    let mut retired = Vec::with_capacity(n.saturating_sub(stop));

    while active.len() > stop.max(1) {
        let i = active.get(rng.random_range(0..active.len()));
        let line = work.row_gram_line(i, &active, &active);
        let j = line.argmax_partner(&active, i).expect("at least two active indices");
        let theta = givens_from_gram2(work.row_norm2(i, &active), line.value(j), work.row_norm2(j, &active));
        let g = GivensRotation::new(i, j, theta, n).expect("distinct in-range pair");
        let (c, s) = g.cos_sin();
        work.rotate_rows(i, j, c, s);
        work.rotate_cols(i, j, c, s);
        rotations.push(g);

        let (ri, rj) = (offdiag_residual(&work, i, &active), offdiag_residual(&work, j, &active));
        let t = if rj < ri || (rj == ri && j < i) { j } else { i };
        active.remove(t);
        retired.push(t);
        observe(rotations.len(), &work);
    }
    if stop == 0 && active.len() == 1 {
        let last = active.get(0);
        active.remove(last);
        retired.push(last);
    }
    ConjugationRun {
        rotations,
        retired,
        active,
        rotated: work.into_matrix(),
    }
}

/// `G_1 ... G_L  H  R_L^T ... R_1^T` for left rotations `G` and right rotations `R`.
pub(crate) fn unrotate(
    h: &SquareMatrix,
    left: &[GivensRotation],
    right: &[GivensRotation],
    exec: Exec,
) -> SquareMatrix {
    let mut work = Work::new(h, exec);
    for g in left.iter().rev() {
        let (c, s) = g.cos_sin();
        work.rotate_rows(g.i, g.j, c, -s);
    }
    for g in right.iter().rev() {
        let (c, s) = g.cos_sin();
        work.rotate_cols(g.i, g.j, c, -s);
    }
    work.into_matrix()
}
