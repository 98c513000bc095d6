//! Mutable rotation workspaces used while a factorization is running.
//!
//! A factorization owns exactly one workspace holding the progressively
//! rotated matrix. Small or dense operands live in a row-major buffer whose
//! Gram lines are evaluated through [`Exec`]; large sparse operands live in
//! mirrored row/column maps so both rotation sides stay proportional to the
//! touched nonzeros.

use std::collections::BTreeMap;

use crate::exec::Exec;
use crate::matcore::{rotate_pair, rotate_slices, DenseMatrix, IndexSet, SquareMatrix};

const COL_CHUNK: usize = 256;

/// One row (or column) of a Gram matrix restricted to an active set.
pub(crate) enum GramLine {
    Dense(Vec<f64>),
    Sparse(BTreeMap<usize, f64>),
}

impl GramLine {
    pub(crate) fn value(&self, t: usize) -> f64 {
        match self {
            GramLine::Dense(v) => v[t],
            GramLine::Sparse(m) => m.get(&t).copied().unwrap_or(0.0),
        }
    }

    /// Active index other than `exclude` with the largest Gram value; ties go
    /// to the smallest index.
    pub(crate) fn argmax_partner(&self, active: &IndexSet, exclude: usize) -> Option<usize> {
        let better = |v: f64, t: usize, best: Option<(f64, usize)>| match best {
            None => true,
            Some((bv, bt)) => v > bv || (v == bv && t < bt),
        };
        let mut best: Option<(f64, usize)> = None;
        match self {
            GramLine::Dense(g) => {
                for t in active.iter().filter(|&t| t != exclude) {
                    if better(g[t], t, best) {
                        best = Some((g[t], t));
                    }
                }
            }
            GramLine::Sparse(m) => {
                let mut touched = 0usize;
                for (&t, &v) in m {
                    if t == exclude || !active.contains(t) {
                        continue;
                    }
                    touched += 1;
                    if better(v, t, best) {
                        best = Some((v, t));
                    }
                }
                let others = active.len() - usize::from(active.contains(exclude));
                if touched < others {
                    let first_zero = active
                        .iter()
                        .find(|&t| t != exclude && !m.contains_key(&t))
                        .expect("an untouched active index exists");
                    if better(0.0, first_zero, best) {
                        best = Some((0.0, first_zero));
                    }
                }
            }
        }
        best.map(|(_, t)| t)
    }
}

pub(crate) struct DenseWork {
    m: DenseMatrix,
    exec: Exec,
}

pub(crate) struct SparseWork {
    n: usize,
    rows: Vec<BTreeMap<usize, f64>>,
    cols: Vec<BTreeMap<usize, f64>>,
}

pub(crate) enum Work {
    Dense(DenseWork),
    Sparse(SparseWork),
}

fn set_or_remove(map: &mut BTreeMap<usize, f64>, k: usize, v: f64) {
    if v == 0.0 {
        map.remove(&k);
    } else {
        map.insert(k, v);
    }
}

impl SparseWork {
    fn new(a: &SquareMatrix) -> Self {
        let n = a.n();
        let mut rows = vec![BTreeMap::new(); n];
        let mut cols = vec![BTreeMap::new(); n];
        for (r, c, v) in a.triplets() {
            rows[r].insert(c, v);
            cols[c].insert(r, v);
        }
        Self { n, rows, cols }
    }

    fn rotate_lines(
        primary: &mut [BTreeMap<usize, f64>],
        mirror: &mut [BTreeMap<usize, f64>],
        i: usize,
        j: usize,
        c: f64,
        s: f64,
    ) {
        let mut keys: Vec<usize> = primary[i].keys().chain(primary[j].keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        for k in keys {
            let a = primary[i].get(&k).copied().unwrap_or(0.0);
            let b = primary[j].get(&k).copied().unwrap_or(0.0);
            let (na, nb) = rotate_pair(a, b, c, s);
            set_or_remove(&mut primary[i], k, na);
            set_or_remove(&mut primary[j], k, nb);
            set_or_remove(&mut mirror[k], i, na);
            set_or_remove(&mut mirror[k], j, nb);
        }
    }

    fn gram_line(
        primary: &[BTreeMap<usize, f64>],
        mirror: &[BTreeMap<usize, f64>],
        i: usize,
        lines: &IndexSet,
        cross: &IndexSet,
    ) -> GramLine {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (&k, &a) in &primary[i] {
            if !cross.contains(k) {
                continue;
            }
            for (&t, &b) in &mirror[k] {
                if lines.contains(t) {
                    *acc.entry(t).or_insert(0.0) += a * b;
                }
            }
        }
        GramLine::Sparse(acc)
    }

    fn into_matrix(self) -> SquareMatrix {
        let entries = self
            .rows
            .into_iter()
            .enumerate()
            .flat_map(|(r, row)| row.into_iter().map(move |(c, v)| (r, c, v)))
            .collect();
        SquareMatrix::sparse(self.n, entries).expect("workspace entries are valid")
    }
}

impl Work {
    pub(crate) fn new(a: &SquareMatrix, exec: Exec) -> Self {
        if a.prefers_dense() {
            Work::Dense(DenseWork { m: a.to_dense(), exec })
        } else {
            Work::Sparse(SparseWork::new(a))
        }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Work::Dense(w) => w.m.get(i, j),
            Work::Sparse(w) => w.rows[i].get(&j).copied().unwrap_or(0.0),
        }
    }

    /// Rows `i`, `j` <- `G^T` applied to them.
    pub(crate) fn rotate_rows(&mut self, i: usize, j: usize, c: f64, s: f64) {
        match self {
            Work::Dense(w) => {
                let (ri, rj) = w.m.rows_mut(i, j);
                rotate_slices(ri, rj, c, s);
            }
            Work::Sparse(w) => SparseWork::rotate_lines(&mut w.rows, &mut w.cols, i, j, c, s),
        }
    }

    /// Columns `i`, `j` <- multiplied on the right by `G`.
    pub(crate) fn rotate_cols(&mut self, i: usize, j: usize, c: f64, s: f64) {
        match self {
            Work::Dense(w) => {
                let n = w.m.n();
                let data = w.m.as_mut_slice();
                for r in 0..n {
                    let (na, nb) = rotate_pair(data[r * n + i], data[r * n + j], c, s);
                    data[r * n + i] = na;
                    data[r * n + j] = nb;
                }
            }
            Work::Sparse(w) => SparseWork::rotate_lines(&mut w.cols, &mut w.rows, i, j, c, s),
        }
    }

    /// `<A[i, cols], A[t, cols]>` for every `t` in `rows`.
    pub(crate) fn row_gram_line(&self, i: usize, rows: &IndexSet, cols: &IndexSet) -> GramLine {
        match self {
            Work::Dense(w) => {
                let n = w.m.n();
                let mask = cols.mask();
                let xi: Vec<f64> =
                    w.m.row(i)
                        .iter()
                        .zip(mask)
                        .map(|(&v, &on)| if on { v } else { 0.0 })
                        .collect();
                let active = rows.as_slice();
                let mut vals = vec![0.0; active.len()];
                let m = &w.m;
                w.exec.fill(&mut vals, active.len() * n, |k| {
                    m.row(active[k]).iter().zip(&xi).map(|(a, b)| a * b).sum()
                });
                let mut out = vec![0.0; n];
                for (&t, v) in active.iter().zip(vals) {
                    out[t] = v;
                }
                GramLine::Dense(out)
            }
            Work::Sparse(w) => SparseWork::gram_line(&w.rows, &w.cols, i, rows, cols),
        }
    }

    /// `<A[rows, i], A[rows, t]>` for every `t` in `cols`.
    pub(crate) fn col_gram_line(&self, i: usize, cols: &IndexSet, rows: &IndexSet) -> GramLine {
        match self {
            Work::Dense(w) => {
                let n = w.m.n();
                let m = &w.m;
                let weights: Vec<(usize, f64)> = rows
                    .iter()
                    .map(|r| (r, m.get(r, i)))
                    .filter(|&(_, a)| a != 0.0)
                    .collect();
                let mut out = vec![0.0; n];
                w.exec.chunks(&mut out, COL_CHUNK, weights.len() * n, |off, chunk| {
                    let len = chunk.len();
                    for &(r, a) in &weights {
                        let src = &m.row(r)[off..off + len];
                        for (o, x) in chunk.iter_mut().zip(src) {
                            *o += a * x;
                        }
                    }
                });
                let mask = cols.mask();
                for (t, v) in out.iter_mut().enumerate() {
                    if !mask[t] {
                        *v = 0.0;
                    }
                }
                GramLine::Dense(out)
            }
            Work::Sparse(w) => SparseWork::gram_line(&w.cols, &w.rows, i, cols, rows),
        }
    }

    /// `||A[t, cols]||^2`.
    pub(crate) fn row_norm2(&self, t: usize, cols: &IndexSet) -> f64 {
        match self {
            Work::Dense(w) => {
                let row = w.m.row(t);
                cols.iter().map(|c| row[c] * row[c]).sum()
            }
            Work::Sparse(w) => w.rows[t]
                .iter()
                .filter(|(&c, _)| cols.contains(c))
                .map(|(_, v)| v * v)
                .sum(),
        }
    }

    /// `||A[rows, t]||^2`.
    pub(crate) fn col_norm2(&self, t: usize, rows: &IndexSet) -> f64 {
        match self {
            Work::Dense(w) => rows.iter().map(|r| w.m.get(r, t).powi(2)).sum(),
            Work::Sparse(w) => w.cols[t]
                .iter()
                .filter(|(&r, _)| rows.contains(r))
                .map(|(_, v)| v * v)
                .sum(),
        }
    }

    pub(crate) fn snapshot(&self) -> SquareMatrix {
        match self {
            Work::Dense(w) => SquareMatrix::Dense(w.m.clone()),
            Work::Sparse(w) => SparseWork {
                n: w.n,
                rows: w.rows.clone(),
                cols: Vec::new(),
            }
            .into_matrix(),
        }
    }

    pub(crate) fn into_matrix(self) -> SquareMatrix {
        match self {
            Work::Dense(w) => SquareMatrix::Dense(w.m),
            Work::Sparse(w) => w.into_matrix(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{apply_givens, row_gram, GivensRotation, Side};

    fn sample() -> SquareMatrix {
        let data: Vec<f64> = (0..36).map(|k| ((k * 7 % 11) as f64 - 5.0) / 3.0).collect();
        SquareMatrix::dense(6, data).unwrap()
    }

    fn both(a: &SquareMatrix) -> [Work; 2] {
        [
            Work::Dense(DenseWork {
                m: a.to_dense(),
                exec: Exec::default(),
            }),
            Work::Sparse(SparseWork::new(a)),
        ]
    }

    #[test]
    fn rotations_match_apply_givens() {
        let a = sample();
        let g = GivensRotation::new(1, 4, 0.37, 6).unwrap();
        let (c, s) = g.cos_sin();
        let expect = apply_givens(&apply_givens(&a, &g, Side::LeftTranspose).unwrap(), &g, Side::Right).unwrap();
        for mut w in both(&a) {
            w.rotate_rows(1, 4, c, s);
            w.rotate_cols(1, 4, c, s);
            let got = w.into_matrix();
            assert!(got.sub(&expect).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn gram_lines_match_row_gram() {
        let a = sample();
        let rows = IndexSet::new(6, vec![0, 2, 3, 5]).unwrap();
        let cols = IndexSet::new(6, vec![1, 2, 4, 5]).unwrap();
        let g = row_gram(&a, &rows, &cols).unwrap();
        for w in both(&a) {
            let line = w.row_gram_line(2, &rows, &cols);
            for (p, t) in rows.iter().enumerate() {
                assert!((line.value(t) - g.get(1, p)).abs() < 1e-13);
            }
            assert!((w.row_norm2(2, &cols) - g.get(1, 1)).abs() < 1e-13);
        }
        let at = a.transpose();
        let gc = row_gram(&at, &cols, &rows).unwrap();
        for w in both(&a) {
            let line = w.col_gram_line(4, &cols, &rows);
            for (p, t) in cols.iter().enumerate() {
                assert!((line.value(t) - gc.get(2, p)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sparse_argmax_considers_untouched_zeros() {
        let mut m = BTreeMap::new();
        m.insert(1, -2.0);
        m.insert(3, -1.0);
        let line = GramLine::Sparse(m);
        let active = IndexSet::new(5, vec![0, 1, 3, 4]).unwrap();
        // 4 is untouched (value 0) and beats the negatives
        assert_eq!(line.argmax_partner(&active, 0), Some(4));
        let dense = GramLine::Dense(vec![0.0, -2.0, 0.0, -1.0, 0.0]);
        assert_eq!(dense.argmax_partner(&active, 0), Some(4));
        let single = IndexSet::new(5, vec![2]).unwrap();
        assert_eq!(dense.argmax_partner(&single, 2), None);
    }
}
