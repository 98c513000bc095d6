use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};

/// Ordered set of distinct indices drawn from `0..n`.
///
/// Keeps a membership mask next to the ordered list so `contains` is O(1);
/// the active sets of every factorization are stored this way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    n: usize,
    indices: Vec<usize>,
    #[serde(skip)]
    member: Vec<bool>,
}

impl IndexSet {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let mut member = vec![false; n];
        for &k in &indices {
            if k >= n {
                return Err(MmfError::InvalidIndexSet(format!("index {k} out of range for n = {n}")));
            }
            if member[k] {
                return Err(MmfError::InvalidIndexSet(format!("index {k} repeated")));
            }
            member[k] = true;
        }
        Ok(Self { n, indices, member })
    }

    /// `[0, 1, ..., n-1]`.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            indices: (0..n).collect(),
            member: vec![true; n],
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indices: Vec::new(),
            member: vec![false; n],
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The `k`-th index in set order.
    pub fn get(&self, k: usize) -> usize {
        self.indices[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, k: usize) -> bool {
        if self.member.len() != self.n {
            // deserialized without the mask
            return self.indices.contains(&k);
        }
        k < self.n && self.member[k]
    }

    pub(crate) fn mask(&self) -> &[bool] {
        &self.member
    }

    /// Removes `k`, preserving the order of the remaining indices.
    pub fn remove(&mut self, k: usize) -> bool {
        if !self.contains(k) {
            return false;
        }
        self.member[k] = false;
        self.indices.retain(|&x| x != k);
        true
    }

    /// Indices of `0..n` not in the set, ascending.
    pub fn complement(&self) -> Self {
        let indices = (0..self.n).filter(|&k| !self.contains(k)).collect();
        Self::new(self.n, indices).expect("complement is always valid")
    }

    /// Rebuilds the membership mask after deserialization.
    pub fn restore_mask(&mut self) {
        let mut member = vec![false; self.n];
        for &k in &self.indices {
            member[k] = true;
        }
        self.member = member;
    }
}
