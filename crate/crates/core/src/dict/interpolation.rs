use super::{DictParams, SortedDictionary, StaticDictionary};
use crate::error::Result;
use crate::keys::SearchOutcome;

/// Classic interpolation search over a sorted array (`is`).
#[derive(Debug, Clone)]
pub struct InterpolationSearch {
    keys: Box<[u64]>,
}

impl InterpolationSearch {
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// First probe position for `x` within `[lo, hi]`.
    #[inline]
    fn probe(a: &[u64], lo: usize, hi: usize, x: u64) -> usize {
        let span = (a[hi] - a[lo]) as f64;
        let pos = lo + (((hi - lo) as f64 / span) * (x - a[lo]) as f64) as usize;
        pos.min(hi)
    }

    /// Lower-bound index of `x`. Keeps the invariant that every key left of
    /// `lo` is `< x` and every key right of `hi` is `> x`.
    #[inline]
    pub fn lower_bound(&self, x: u64) -> usize {
        let a = &self.keys;
        if a.is_empty() {
            return 0;
        }
        let (mut lo, mut hi) = (0usize, a.len() - 1);
        loop {
            if x < a[lo] {
                return lo;
            }
            if x > a[hi] {
                return hi + 1;
            }
            if lo == hi {
                // a[lo] == x here
                return lo;
            }
            let pos = Self::probe(a, lo, hi, x);
            let v = a[pos];
            if v == x {
                return pos;
            }
            if v < x {
                lo = pos + 1;
            } else {
                // pos > lo because a[lo] <= x < a[pos]
                hi = pos - 1;
            }
            if lo > hi {
                return lo;
            }
        }
    }
}

impl SortedDictionary for InterpolationSearch {
    const ID: &'static str = "is";

    fn build(keys: &[u64], _params: &DictParams) -> Result<Self> {
        Ok(InterpolationSearch { keys: keys.into() })
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn aux_heap_bytes(&self) -> usize {
        0
    }

    fn search_mut(&mut self, x: u64) -> SearchOutcome {
        self.search(x)
    }
}

impl StaticDictionary for InterpolationSearch {
    #[inline]
    fn search(&self, x: u64) -> SearchOutcome {
        SearchOutcome::from_lower_bound(&self.keys, self.lower_bound(x), x)
    }
}
