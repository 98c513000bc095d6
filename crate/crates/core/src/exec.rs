//! Execution policy for the data-parallel inner loops.
//!
//! Gram-row evaluation and the dense rotation kernels are the hot loops of
//! every factorization. With the `parallel` feature they run on the rayon
//! global pool; without it, [`Exec::Parallel`] silently degrades to the
//! sequential path so callers never need `cfg` guards of their own.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many multiply-adds a parallel split costs more than it saves.
const PAR_MIN_WORK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this policy will actually fan out for a job of `work` flops.
    pub fn is_parallel_for(self, work: usize) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel && work >= PAR_MIN_WORK
    }

    /// Fills `out[k] = f(k)`.
    pub(crate) fn fill<F>(self, out: &mut [f64], work: usize, f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(work) {
            out.par_iter_mut().enumerate().for_each(|(k, v)| *v = f(k));
            return;
        }
        let _ = work;
        for (k, v) in out.iter_mut().enumerate() {
            *v = f(k);
        }
    }

    /// Runs `f(offset, chunk)` over consecutive chunks of `out`.
    pub(crate) fn chunks<F>(self, out: &mut [f64], chunk: usize, work: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(work) {
            out.par_chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k * chunk, c));
            return;
        }
        let _ = work;
        for (k, c) in out.chunks_mut(chunk).enumerate() {
            f(k * chunk, c);
        }
    }

    /// Runs two independent jobs, concurrently when allowed.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return rayon::join(a, b);
        }
        (a(), b())
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let mut a = vec![0.0; 100_000];
        let mut b = vec![0.0; 100_000];
        Exec::Sequential.fill(&mut a, usize::MAX, |k| (k as f64).sqrt());
        Exec::Parallel.fill(&mut b, usize::MAX, |k| (k as f64).sqrt());
        assert_eq!(a, b);

        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(Exec::Sequential.map(&xs, |x| x * 3), Exec::Parallel.map(&xs, |x| x * 3));
    }

    #[test]
    fn chunked_offsets_cover_everything() {
        let mut out = vec![0.0; 1003];
        Exec::Parallel.chunks(&mut out, 64, usize::MAX, |off, c| {
            for (k, v) in c.iter_mut().enumerate() {
                *v = (off + k) as f64;
            }
        });
        assert!(out.iter().enumerate().all(|(k, v)| *v == k as f64));
    }
}
