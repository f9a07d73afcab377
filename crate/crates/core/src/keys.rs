//! Key sets, search outcomes and gap statistics.
//!
//! Every search structure in this crate answers queries with lower-bound
//! semantics: the rank of the smallest stored key that is `>= x`, with
//! `len()` meaning "past the end". Predecessor and range queries are
//! derived from that single rank.

use std::ops::Deref;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// A strictly increasing set of 64-bit keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SortedKeySet {
    keys: Vec<u64>,
    universe: Option<(u64, u64)>,
}

impl SortedKeySet {
    /// Wraps an already sorted, duplicate-free vector.
    pub fn new(keys: Vec<u64>) -> Result<Self> {
        if let Some(index) = keys.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotStrictlyIncreasing { index: index + 1 });
        }
        Ok(SortedKeySet { keys, universe: None })
    }

    /// Sorts and deduplicates arbitrary input. Returns the set together with
    /// the number of duplicates that were dropped.
    pub fn from_unsorted(mut keys: Vec<u64>) -> (Self, usize) {
        keys.sort_unstable();
        let before = keys.len();
        keys.dedup();
        let removed = before - keys.len();
        (SortedKeySet { keys, universe: None }, removed)
    }

    /// Attaches inclusive universe bounds `(lo, hi)`.
    pub fn with_universe(mut self, lo: u64, hi: u64) -> Self {
        self.universe = Some((lo, hi));
        self
    }

    pub fn universe_hint(&self) -> Option<(u64, u64)> {
        self.universe
    }

    /// Universe bounds to draw queries from: the hint when present, else
    /// the span of the stored keys.
    pub fn universe(&self) -> Option<(u64, u64)> {
        self.universe.or_else(|| Some((*self.keys.first()?, *self.keys.last()?)))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.keys
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.keys
    }

    pub fn contains(&self, x: u64) -> bool {
        self.keys.binary_search(&x).is_ok()
    }

    /// Keys in `[lo, hi]`, computed as two rank searches and a slice.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        if lo > hi {
            return &[];
        }
        let start = self.keys.partition_point(|&k| k < lo);
        let end = self.keys.partition_point(|&k| k <= hi);
        &self.keys[start..end]
    }
}

impl Deref for SortedKeySet {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.keys
    }
}

/// Result of a rank search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchOutcome {
    /// Index of the smallest key `>= x`; equals the set size when no such key exists.
    pub rank: usize,
    pub found: bool,
}

impl SearchOutcome {
    pub const fn new(rank: usize, found: bool) -> Self {
        SearchOutcome { rank, found }
    }

    /// Builds an outcome from a lower-bound index into `keys`.
    #[inline]
    pub fn from_lower_bound(keys: &[u64], rank: usize, x: u64) -> Self {
        SearchOutcome { rank, found: rank < keys.len() && keys[rank] == x }
    }

    /// Shifts a bucket-local outcome to a global rank.
    #[inline]
    pub fn offset(self, by: usize) -> Self {
        SearchOutcome { rank: self.rank + by, found: self.found }
    }

    /// Largest key `<= x`, given the key array this outcome refers to.
    pub fn predecessor(&self, keys: &[u64]) -> Option<u64> {
        if self.found {
            Some(keys[self.rank])
        } else if self.rank > 0 {
            Some(keys[self.rank - 1])
        } else {
            None
        }
    }
}

/// Linear-scan ground truth for every dictionary in the crate.
pub fn oracle_rank_search(keys: &[u64], x: u64) -> SearchOutcome {
    let rank = keys.iter().take_while(|&&k| k < x).count();
    SearchOutcome::from_lower_bound(keys, rank, x)
}

/// Minimum and maximum gap between consecutive keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapStats {
    pub g_min: u64,
    pub g_max: u64,
}

impl GapStats {
    /// Exact gap ratio `g_max / g_min`.
    pub fn ratio(&self) -> Ratio<u128> {
        Ratio::new(self.g_max as u128, self.g_min as u128)
    }

    pub fn delta(&self) -> f64 {
        self.g_max as f64 / self.g_min as f64
    }
}

/// Scans consecutive differences of a sorted set.
pub fn gap_stats(keys: &[u64]) -> Result<GapStats> {
    if keys.len() < 2 {
        return Err(Error::InsufficientKeys(keys.len()));
    }
    let (g_min, g_max) = keys.windows(2).map(|w| w[1] - w[0]).fold((u64::MAX, 0), |(lo, hi), g| (lo.min(g), hi.max(g)));
    Ok(GapStats { g_min, g_max })
}

pub(crate) fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
