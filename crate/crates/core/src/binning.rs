//! Equal-width binning.
//!
//! `[A[0], A[n-1]]` is cut into `k` bins of width `L / k`, `L = A[n-1] - A[0]`.
//! The bin of `x` is `ceil((x - A[0]) k / L)`, clamped to `[1, k]`, evaluated
//! exactly in integer arithmetic.

use crate::dict::{DictParams, SortedDictionary};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{GenericModel, LearnedDictionary, Route};

/// The routing half of a binned dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binning {
    lo: u64,
    hi: u64,
    k: usize,
    /// `(x - lo) * k + span` fits in 64 bits for every `x` in range.
    narrow: bool,
}

/// Binning with a dictionary per non-empty bin.
pub type BinPartition<D> = LearnedDictionary<Binning, D>;

impl Binning {
    pub fn new(lo: u64, hi: u64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroBins);
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
        }
        let span = (hi - lo) as u128;
        let narrow = span * k as u128 + span <= u64::MAX as u128;
        Ok(Binning { lo, hi, k, narrow })
    }

    /// Bins spanning the first and last key.
    pub fn over(keys: &[u64], k: usize) -> Result<Self> {
        match (keys.first(), keys.last()) {
            (Some(&lo), Some(&hi)) => Binning::new(lo, hi, k),
            _ => Err(Error::EmptyKeySet),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// One-based bin of `x`, for `lo <= x <= hi`.
    #[inline]
    pub fn bin_index(&self, x: u64) -> usize {
        debug_assert!(self.lo <= x && x <= self.hi);
        let span = self.hi - self.lo;
        if span == 0 {
            return 1;
        }
        let d = x - self.lo;
        let raw = if self.narrow {
            (d * self.k as u64).div_ceil(span) as usize
        } else {
            ((d as u128 * self.k as u128).div_ceil(span as u128)) as usize
        };
        raw.max(1)
    }

    /// Rank offsets `starts[0..=k]` of every bin over sorted `keys`.
    pub fn partition(&self, keys: &[u64]) -> Vec<usize> {
        let mut counts = vec![0usize; self.k + 1];
        for &x in keys {
            counts[self.bin_index(x)] += 1;
        }
        for b in 1..=self.k {
            counts[b] += counts[b - 1];
        }
        counts
    }

    /// Real offsets from `lo` covered by one-based bin `b`: `((b-1)L/k, bL/k]`.
    pub fn bin_extent(&self, b: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) as f64 / self.k as f64;
        ((b - 1) as f64 * w, b as f64 * w)
    }
}

impl GenericModel for Binning {
    const ID: &'static str = "binning";

    fn intervals(&self) -> usize {
        self.k
    }

    #[inline]
    fn route(&self, x: u64) -> Route {
        if x < self.lo {
            Route::Below
        } else if x > self.hi {
            Route::Above
        } else {
            Route::Interval(self.bin_index(x) - 1)
        }
    }

    fn heap_bytes(&self) -> usize {
        0
    }
}

/// Bin count for a percentage of `n`; zero percent means a single bin.
pub fn k_for_percentage(n: usize, pct: f64) -> usize {
    ((pct / 100.0 * n as f64).round() as usize).max(1)
}

pub fn build<D: SortedDictionary>(keys: &[u64], k: usize, params: &DictParams) -> Result<BinPartition<D>> {
    build_with(keys, k, params, Execution::default())
}

/// Builds the per-bin dictionaries, in parallel when `exec` allows.
pub fn build_with<D: SortedDictionary>(
    keys: &[u64],
    k: usize,
    params: &DictParams,
    exec: Execution,
) -> Result<BinPartition<D>> {
    let model = Binning::over(keys, k)?;
    let starts = model.partition(keys);
    LearnedDictionary::from_parts(model, keys, starts, params, exec)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dict::conformance::{mixed_queries, random_keys};
    use crate::dict::{BranchyBinarySearch, EytzingerLayout, SplayTree, StaticDictionary};
    use crate::keys::{gap_stats, oracle_rank_search, SearchOutcome};
    use crate::testutil::FIG_KEYS;

    fn bbs(keys: &[u64], k: usize) -> BinPartition<BranchyBinarySearch> {
        build(keys, k, &DictParams::default()).unwrap()
    }

    #[test]
    fn bin_index_examples() {
        let m = Binning::over(&FIG_KEYS, 4).unwrap();
        assert_eq!(m.bin_index(316), 2);
        assert_eq!(m.bin_index(47), 1);
        assert_eq!(m.bin_index(939), 4);
        assert_eq!(Binning::new(5, 5, 7).unwrap().bin_index(5), 1);
    }

    #[test]
    fn wide_arithmetic_is_exact() {
        let m = Binning::new(0, u64::MAX, 1 << 20).unwrap();
        assert!(!m.narrow);
        assert_eq!(m.bin_index(u64::MAX), 1 << 20);
        assert_eq!(m.bin_index(1), 1);
        // x just past a bin border lands in the next bin
        let border = (u64::MAX as u128 * 3 / (1 << 20)) as u64;
        assert_eq!(m.bin_index(border), 3);
        assert_eq!(m.bin_index(border + 1), 4);
    }

    #[test]
    fn example_partition() {
        let d = bbs(&FIG_KEYS, 4);
        let contents: Vec<&[u64]> = (0..4).map(|b| &FIG_KEYS[d.interval_ranks(b)]).collect();
        assert_eq!(contents, vec![&[47, 105, 140][..], &[289, 316, 358, 386, 398], &[], &[819, 939]]);
        assert_eq!(d.max_load(), 5);
        assert_eq!(d.query(700), SearchOutcome::new(8, false));
        assert_eq!(d.query(316), SearchOutcome::new(4, true));
        assert_eq!(d.query(46), SearchOutcome::new(0, false));
        assert_eq!(d.query(1000), SearchOutcome::new(10, false));
        assert_eq!(bbs(&FIG_KEYS, 1).max_load(), 10);
    }

    #[test]
    fn k_equal_n_on_progression_holds_at_most_one_key_per_bin() {
        let keys: Vec<u64> = (0..1000).map(|i| 17 + 3 * i).collect();
        assert_eq!(bbs(&keys, keys.len()).max_load(), 1);
    }

    #[test]
    fn rejects_zero_bins() {
        assert!(matches!(build::<BranchyBinarySearch>(&FIG_KEYS, 0, &DictParams::default()), Err(Error::ZeroBins)));
        assert!(matches!(build::<BranchyBinarySearch>(&[], 3, &DictParams::default()), Err(Error::EmptyKeySet)));
    }

    #[test]
    fn single_bin_matches_bare_dictionary() {
        let keys = random_keys(5000, 1 << 30, 3);
        let d = bbs(&keys, 1);
        let bare = BranchyBinarySearch::build(&keys, &DictParams::default()).unwrap();
        for x in mixed_queries(&keys, 5000, 3) {
            assert_eq!(d.query(x), bare.search(x));
        }
    }

    #[test]
    fn overhead_is_monotone_in_k() {
        let keys = random_keys(10_000, 1 << 40, 5);
        let n = keys.len();
        let mut last = 0;
        for k in [1, n / 100, n / 10, n] {
            let bytes = bbs(&keys, k).overhead_bytes();
            assert!(bytes >= last, "k={k}");
            last = bytes;
        }
        // a bin costs one dictionary handle and one rank offset
        let per_bin = std::mem::size_of::<Option<BranchyBinarySearch>>() + 8;
        let d = bbs(&keys, n);
        assert!(d.overhead_bytes() >= n * per_bin);
        assert!(d.overhead_bytes() <= n * per_bin + 256);
    }

    #[test]
    fn load_stays_within_gap_ratio_bound() {
        for seed in 0..5 {
            let keys = random_keys(20_000, 1 << 32, seed);
            let n = keys.len() as f64;
            let delta = gap_stats(&keys).unwrap().delta();
            for k in [10, 100, 1000, 20_000] {
                let bound = (n * delta / k as f64).ceil() * 2.0;
                assert!(bbs(&keys, k).max_load() as f64 <= bound.min(n));
            }
        }
    }

    #[test]
    fn splay_final_stage_through_exclusive_access() {
        let keys = random_keys(3000, 1 << 24, 11);
        let mut d: BinPartition<SplayTree> = build(&keys, 300, &DictParams::default()).unwrap();
        for x in mixed_queries(&keys, 3000, 11) {
            assert_eq!(d.query_mut(x), oracle_rank_search(&keys, x));
        }
    }

    #[test]
    fn percentage_to_bins() {
        assert_eq!(k_for_percentage(1000, 0.0), 1);
        assert_eq!(k_for_percentage(1000, 10.0), 100);
        assert_eq!(k_for_percentage(1000, 100.0), 1000);
    }

    proptest! {
        #[test]
        fn routing_matches_oracle_on_small_universes(
            raw in proptest::collection::btree_set(0u64..1024, 1..64),
            k in 1usize..80,
        ) {
            let keys: Vec<u64> = raw.into_iter().collect();
            let d: BinPartition<EytzingerLayout> = build(&keys, k, &DictParams::default()).unwrap();
            for x in 0..1024u64 {
                prop_assert_eq!(d.query(x), oracle_rank_search(&keys, x));
            }
            // every key sits in the bin the formula names
            for (rank, &x) in keys.iter().enumerate() {
                let b = d.model().bin_index(x) - 1;
                prop_assert!(d.interval_ranks(b).contains(&rank));
            }
            let concat: Vec<u64> = (0..k).flat_map(|b| keys[d.interval_ranks(b)].to_vec()).collect();
            prop_assert_eq!(concat, keys);
        }
    }
}
