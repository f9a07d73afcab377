//! Final-stage sorted-set dictionaries.
//!
//! Array layouts (`bbs`, `bfs`, `bfe`, `bft`, `is`, `css`) are immutable after
//! construction and implement [`StaticDictionary`], so they can be queried
//! through a shared reference from many threads. The splay tree restructures
//! itself on every access; it only implements [`SortedDictionary::search_mut`]
//! and therefore needs exclusive access even for queries.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::keys::SearchOutcome;

mod binary;
mod btree;
mod css;
mod eytzinger;
mod interpolation;
mod prefetch;
mod splay;

pub use binary::{BranchyBinarySearch, UniformBinarySearch};
pub use btree::BTreeLayout;
pub use css::CssTree;
pub use eytzinger::EytzingerLayout;
pub use interpolation::InterpolationSearch;
pub use splay::SplayTree;

/// Bytes per cache line assumed by the layouts.
pub const CACHE_LINE_BYTES: usize = 64;
/// Keys per cache line.
pub const KEYS_PER_LINE: usize = CACHE_LINE_BYTES / std::mem::size_of::<u64>();

/// Tunables shared by all dictionary builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictParams {
    /// Keys per node of the B-tree layout.
    pub btree_block: usize,
    /// Separators per internal node of the CSS tree.
    pub css_fanout: usize,
}

impl Default for DictParams {
    fn default() -> Self {
        DictParams { btree_block: KEYS_PER_LINE, css_fanout: 16 }
    }
}

impl DictParams {
    pub fn validate(&self) -> Result<()> {
        if self.btree_block == 0 {
            return Err(Error::ZeroBlockFactor);
        }
        if self.css_fanout < 2 {
            return Err(Error::BadFanout(self.css_fanout));
        }
        Ok(())
    }
}

/// A sorted-set dictionary built over a sorted slice of keys.
pub trait SortedDictionary: Send + Sized {
    /// Short identifier used in CSV output.
    const ID: &'static str;

    /// `keys` must be strictly increasing; it may be empty.
    fn build(keys: &[u64], params: &DictParams) -> Result<Self>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Heap bytes held beyond the raw `8 * len()` key payload.
    fn aux_heap_bytes(&self) -> usize;

    /// Lower-bound search. Self-adjusting structures restructure here.
    fn search_mut(&mut self, x: u64) -> SearchOutcome;

    /// Whether query cost depends on earlier queries.
    fn order_sensitive() -> bool {
        false
    }
}

/// Dictionaries whose queries do not mutate them.
pub trait StaticDictionary: SortedDictionary + Sync {
    fn search(&self, x: u64) -> SearchOutcome;
}

/// Dictionaries that also support updates.
pub trait DynamicDictionary: SortedDictionary {
    /// Returns `false` when `x` was already present.
    fn insert(&mut self, x: u64) -> bool;
    /// Returns `false` when `x` was absent.
    fn delete(&mut self, x: u64) -> bool;
    /// Key with the given rank.
    fn select(&mut self, rank: usize) -> Option<u64>;
    /// All keys in increasing order.
    fn to_sorted_vec(&self) -> Vec<u64>;
}

/// The seven dictionary identifiers accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DictKind {
    Bbs,
    Bfs,
    Bfe,
    /// B-tree layout with the given page size (keys per node).
    Bft(usize),
    Is,
    Css,
    Splay,
}

impl DictKind {
    pub const VALID_IDS: &'static str = "bbs,bfs,bfe,bft[:B],is,css,splay";

    pub fn all() -> Vec<DictKind> {
        use DictKind::*;
        vec![Bbs, Bfs, Bfe, Bft(KEYS_PER_LINE), Is, Css, Splay]
    }

    pub fn params(self) -> DictParams {
        match self {
            DictKind::Bft(b) => DictParams { btree_block: b, ..DictParams::default() },
            _ => DictParams::default(),
        }
    }

    pub fn order_sensitive(self) -> bool {
        self == DictKind::Splay
    }

    /// Parses a comma separated list such as `bbs,bft:16,splay`.
    pub fn parse_list(s: &str) -> Result<Vec<DictKind>> {
        s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse()).collect()
    }
}

impl fmt::Display for DictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictKind::Bbs => f.write_str("bbs"),
            DictKind::Bfs => f.write_str("bfs"),
            DictKind::Bfe => f.write_str("bfe"),
            DictKind::Bft(b) => write!(f, "bft:{b}"),
            DictKind::Is => f.write_str("is"),
            DictKind::Css => f.write_str("css"),
            DictKind::Splay => f.write_str("splay"),
        }
    }
}

impl FromStr for DictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownDictionary { given: s.to_string(), valid: DictKind::VALID_IDS.to_string() };
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "bbs" => DictKind::Bbs,
            "bfs" => DictKind::Bfs,
            "bfe" => DictKind::Bfe,
            "bft" => DictKind::Bft(KEYS_PER_LINE),
            "is" => DictKind::Is,
            "css" => DictKind::Css,
            "splay" => DictKind::Splay,
            other => {
                let page = other.strip_prefix("bft:").or_else(|| other.strip_prefix("bft")).ok_or_else(unknown)?;
                let b: usize = page.parse().map_err(|_| unknown())?;
                if b == 0 {
                    return Err(Error::ZeroBlockFactor);
                }
                DictKind::Bft(b)
            }
        })
    }
}

/// Runs `$body` with `$D` bound to the concrete dictionary type for `$kind`.
///
/// ```
/// use learned_dict::{with_dictionary, DictKind, SortedDictionary};
/// let id = with_dictionary!(DictKind::Css, D => D::ID);
/// assert_eq!(id, "css");
/// ```
#[macro_export]
macro_rules! with_dictionary {
    ($kind:expr, $D:ident => $body:expr) => {{
        use $crate::dict::*;
        match $kind {
            DictKind::Bbs => {
                type $D = BranchyBinarySearch;
                $body
            }
            DictKind::Bfs => {
                type $D = UniformBinarySearch;
                $body
            }
            DictKind::Bfe => {
                type $D = EytzingerLayout;
                $body
            }
            DictKind::Bft(_) => {
                type $D = BTreeLayout;
                $body
            }
            DictKind::Is => {
                type $D = InterpolationSearch;
                $body
            }
            DictKind::Css => {
                type $D = CssTree;
                $body
            }
            DictKind::Splay => {
                type $D = SplayTree;
                $body
            }
        }
    }};
}

#[cfg(test)]
pub(crate) mod conformance {
    //! Oracle-equivalence checks shared by every dictionary's tests.
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::keys::oracle_rank_search;

    pub fn random_keys(n: usize, universe: u64, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<u64> = (0..n * 2).map(|_| rng.gen_range(0..universe)).collect();
        v.sort_unstable();
        v.dedup();
        v.truncate(n);
        v
    }

    /// Mixed queries: members, neighbours of members, random values and extremes.
    pub fn mixed_queries(keys: &[u64], m: usize, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        let mut out = vec![0, u64::MAX];
        let hi = keys.last().copied().unwrap_or(1000).saturating_add(10);
        while out.len() < m {
            let q = match rng.gen_range(0..4) {
                0 if !keys.is_empty() => keys[rng.gen_range(0..keys.len())],
                1 if !keys.is_empty() => keys[rng.gen_range(0..keys.len())].wrapping_add(1),
                2 if !keys.is_empty() => keys[rng.gen_range(0..keys.len())].wrapping_sub(1),
                _ => rng.gen_range(0..=hi),
            };
            out.push(q);
        }
        out
    }

    pub fn check_against_oracle<D: SortedDictionary>(keys: &[u64], params: &DictParams, queries: &[u64]) {
        let mut d = D::build(keys, params).unwrap();
        assert_eq!(d.len(), keys.len());
        for &x in queries {
            let want = oracle_rank_search(keys, x);
            assert_eq!(d.search_mut(x), want, "{} n={} x={x}", D::ID, keys.len());
        }
    }

    pub fn sweep<D: SortedDictionary>(params: &DictParams) {
        for (seed, n) in [0usize, 1, 2, 3, 10, 64, 100, 1000, 5000].into_iter().enumerate() {
            let keys = random_keys(n, 1 << 20, seed as u64);
            let queries = mixed_queries(&keys, 2000, seed as u64);
            check_against_oracle::<D>(&keys, params, &queries);
        }
        // dense keys stress the equality paths
        let keys: Vec<u64> = (0..777).collect();
        let queries: Vec<u64> = (0..800).collect();
        check_against_oracle::<D>(&keys, params, &queries);
        // extremes of the key domain
        let keys = vec![0, 1, u64::MAX / 2, u64::MAX - 1, u64::MAX];
        check_against_oracle::<D>(&keys, params, &[0, 1, 2, u64::MAX / 2, u64::MAX - 2, u64::MAX - 1, u64::MAX]);
    }
}
