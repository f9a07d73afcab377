use super::prefetch::prefetch_at;
use super::{DictParams, SortedDictionary, StaticDictionary};
use crate::error::Result;
use crate::keys::SearchOutcome;

/// Textbook binary search over a sorted array (`bbs`).
#[derive(Debug, Clone)]
pub struct BranchyBinarySearch {
    keys: Box<[u64]>,
}

/// Branch-free uniform binary search with prefetching (`bfs`).
#[derive(Debug, Clone)]
pub struct UniformBinarySearch {
    keys: Box<[u64]>,
}

/// Branchy search with an early exit on equality. The final `right` is the
/// lower bound when the key is absent.
#[inline]
pub fn branchy_lower_bound(keys: &[u64], x: u64) -> usize {
    let (mut left, mut right) = (0usize, keys.len());
    while left < right {
        let m = left + (right - left) / 2;
        let v = keys[m];
        if x < v {
            right = m;
        } else if x > v {
            left = m + 1;
        } else {
            return m;
        }
    }
    right
}

/// Uniform (halving) search: the probe count depends only on `keys.len()`.
/// `on_step` runs once per loop iteration.
#[inline(always)]
pub(crate) fn uniform_lower_bound(keys: &[u64], x: u64, mut on_step: impl FnMut()) -> usize {
    let mut n = keys.len();
    if n == 0 {
        return 0;
    }
    let mut base = 0usize;
    while n > 1 {
        on_step();
        let half = n / 2;
        prefetch_at(keys, base + half / 2);
        prefetch_at(keys, base + half + half / 2);
        base = if keys[base + half] < x { base + half } else { base };
        n -= half;
    }
    base + (keys[base] < x) as usize
}

impl BranchyBinarySearch {
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }
}

impl UniformBinarySearch {
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// Loop iterations the search performs for `x`.
    pub fn probe_count(&self, x: u64) -> usize {
        let mut steps = 0;
        uniform_lower_bound(&self.keys, x, || steps += 1);
        steps
    }
}

macro_rules! sorted_array_dictionary {
    ($ty:ident, $id:literal, $search:expr) => {
        impl SortedDictionary for $ty {
            const ID: &'static str = $id;

            fn build(keys: &[u64], _params: &DictParams) -> Result<Self> {
                Ok($ty { keys: keys.into() })
            }

            fn len(&self) -> usize {
                self.keys.len()
            }

            fn aux_heap_bytes(&self) -> usize {
                0
            }

            #[inline]
            fn search_mut(&mut self, x: u64) -> SearchOutcome {
                self.search(x)
            }
        }

        impl StaticDictionary for $ty {
            #[inline]
            fn search(&self, x: u64) -> SearchOutcome {
                let rank = $search(&self.keys, x);
                SearchOutcome::from_lower_bound(&self.keys, rank, x)
            }
        }
    };
}

sorted_array_dictionary!(BranchyBinarySearch, "bbs", branchy_lower_bound);
sorted_array_dictionary!(UniformBinarySearch, "bfs", |k: &[u64], x| uniform_lower_bound(k, x, || {}));
