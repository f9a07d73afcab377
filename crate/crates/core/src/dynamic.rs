//! Dynamic binning with amortized rebuilds.
//!
//! The bins cover the extended range `[A[0] - LΔ̂, A[n-1] + LΔ̂]` so that
//! inserts near the current extremes stay routable. The structure is
//! rebuilt from scratch when `n/2` updates have happened since the last
//! rebuild, when a conservative bound on the gap ratio exceeds Δ̂, or when
//! an insert falls outside the range. Every rebuild is recorded in a
//! [`RebuildLedger`].

use num_rational::Ratio;

use crate::dict::{DictParams, DynamicDictionary, SplayTree};
use crate::error::{Error, Result};
use crate::keys::{gap_stats, ratio_to_f64, SearchOutcome};

/// Largest extension used on either side of the keys; beyond this the
/// extended range already covers the whole 64-bit domain many times over.
const EXT_CAP: u128 = 1 << 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RebuildTrigger {
    UpdateCount,
    DeltaGrowth,
    OutOfRange,
}

impl RebuildTrigger {
    pub fn as_str(self) -> &'static str {
        match self {
            RebuildTrigger::UpdateCount => "update_count",
            RebuildTrigger::DeltaGrowth => "delta_growth",
            RebuildTrigger::OutOfRange => "out_of_range",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RebuildEvent {
    pub trigger: RebuildTrigger,
    /// Elements redistributed by the rebuild.
    pub elements_touched: usize,
    /// Updates applied between the previous rebuild and this one.
    pub updates_since_previous: usize,
    /// Value of `total_updates` when the rebuild ran.
    pub at_update: u64,
    pub delta_hat: Ratio<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RebuildLedger {
    pub total_updates: u64,
    pub events: Vec<RebuildEvent>,
    pub delta_max_seen: Ratio<u128>,
}

impl RebuildLedger {
    pub fn count(&self, trigger: RebuildTrigger) -> usize {
        self.events.iter().filter(|e| e.trigger == trigger).count()
    }

    pub fn elements_touched(&self) -> usize {
        self.events.iter().map(|e| e.elements_touched).sum()
    }

    pub fn touches_per_update(&self) -> f64 {
        if self.total_updates == 0 {
            0.0
        } else {
            self.elements_touched() as f64 / self.total_updates as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmortizedReport {
    pub touches_per_update: f64,
    pub delta_max: f64,
}

/// Prefix sums over bin sizes.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn from_counts(counts: &[usize]) -> Self {
        let mut tree = vec![0; counts.len() + 1];
        for (i, &c) in counts.iter().enumerate() {
            let mut j = i + 1;
            tree[j] += c;
            let parent = j + (j & j.wrapping_neg());
            if parent < tree.len() {
                let v = tree[j];
                j = parent;
                tree[j] += v;
            }
        }
        Fenwick { tree }
    }

    fn add(&mut self, i: usize, delta: isize) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j].wrapping_add_signed(delta);
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of the first `i` counts.
    fn prefix(&self, i: usize) -> usize {
        let mut j = i;
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    /// Index holding the element of rank `r`, with the rank of its first element.
    fn find(&self, mut r: usize) -> (usize, usize) {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        let mut before = 0;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
                before += self.tree[next];
            }
            step >>= 1;
        }
        (pos, before)
    }
}

/// Dynamic learned dictionary over `k` equal-width bins.
///
/// Every operation, searches included, needs `&mut self`: the bins are
/// self-adjusting by default and rebuilds relocate every element.
#[derive(Debug, Clone)]
pub struct DynamicBinDict<D = SplayTree> {
    k: usize,
    delta_hat: Ratio<u128>,
    span: u64,
    lo: i128,
    hi: i128,
    width: u128,
    bins: Vec<D>,
    sizes: Fenwick,
    len: usize,
    n_at_rebuild: usize,
    updates_since_rebuild: usize,
    g_min_bound: u64,
    g_max_bound: u64,
    ledger: RebuildLedger,
    params: DictParams,
}

fn exact_delta(keys: &[u64]) -> Option<Ratio<u128>> {
    gap_stats(keys).ok().map(|g| g.ratio())
}

fn doubled(r: Ratio<u128>) -> Ratio<u128> {
    if r.denom().is_multiple_of(2) {
        Ratio::new(*r.numer(), r.denom() / 2)
    } else {
        r.numer().checked_mul(2).map_or(Ratio::from_integer(u128::MAX), |n| Ratio::new(n, *r.denom()))
    }
}

impl<D: DynamicDictionary> DynamicBinDict<D> {
    /// Builds over strictly increasing `keys` (at least two) with `k` bins.
    pub fn build(keys: &[u64], k: usize) -> Result<Self> {
        Self::build_with(keys, k, &DictParams::default())
    }

    pub fn build_with(keys: &[u64], k: usize, params: &DictParams) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroBins);
        }
        if let Some(index) = keys.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotStrictlyIncreasing { index: index + 1 });
        }
        let delta_hat = exact_delta(keys).ok_or(Error::InsufficientKeys(keys.len()))?;
        let mut d = DynamicBinDict {
            k,
            delta_hat,
            span: 0,
            lo: 0,
            hi: 0,
            width: 1,
            bins: Vec::new(),
            sizes: Fenwick::from_counts(&[]),
            len: 0,
            n_at_rebuild: 0,
            updates_since_rebuild: 0,
            g_min_bound: 0,
            g_max_bound: 0,
            ledger: RebuildLedger { total_updates: 0, events: Vec::new(), delta_max_seen: delta_hat },
            params: *params,
        };
        d.layout(keys);
        d.distribute(keys)?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta_hat(&self) -> Ratio<u128> {
        self.delta_hat
    }

    /// Inclusive extended range covered by the bins.
    pub fn range(&self) -> (i128, i128) {
        (self.lo, self.hi)
    }

    pub fn bin_width(&self) -> u128 {
        self.width
    }

    /// `A[n-1] - A[0]` at the last rebuild.
    pub fn span(&self) -> u64 {
        self.span
    }

    pub fn gap_bounds(&self) -> (u64, u64) {
        (self.g_min_bound, self.g_max_bound)
    }

    pub fn updates_since_rebuild(&self) -> usize {
        self.updates_since_rebuild
    }

    pub fn n_at_rebuild(&self) -> usize {
        self.n_at_rebuild
    }

    pub fn ledger(&self) -> &RebuildLedger {
        &self.ledger
    }

    pub fn max_bin_load(&self) -> usize {
        self.bins.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    pub fn amortized_report(&self) -> AmortizedReport {
        AmortizedReport {
            touches_per_update: self.ledger.touches_per_update(),
            delta_max: ratio_to_f64(&self.ledger.delta_max_seen),
        }
    }

    /// All stored keys in increasing order.
    pub fn to_sorted_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len);
        for b in &self.bins {
            out.extend(b.to_sorted_vec());
        }
        out
    }

    /// Updates between two update-count rebuilds.
    fn window(&self) -> usize {
        (self.n_at_rebuild / 2).max(1)
    }

    /// Recomputes span, range and bin width around `keys` (nonempty).
    fn layout(&mut self, keys: &[u64]) {
        let (first, last) = (keys[0], keys[keys.len() - 1]);
        self.span = last - first;
        let (num, den) = (*self.delta_hat.numer(), *self.delta_hat.denom());
        let ext = (self.span as u128).checked_mul(num).map_or(EXT_CAP, |p| p.div_ceil(den).min(EXT_CAP)) as i128;
        self.lo = first as i128 - ext;
        self.hi = last as i128 + ext;
        self.width = ((self.hi - self.lo) as u128).div_ceil(self.k as u128).max(1);
    }

    #[inline]
    fn in_range(&self, x: u64) -> bool {
        self.lo <= x as i128 && x as i128 <= self.hi
    }

    #[inline]
    fn bin_of(&self, x: u64) -> usize {
        (((x as i128 - self.lo) as u128 / self.width) as usize).min(self.k - 1)
    }

    /// Rebuilds every bin from sorted `keys` and resets the counters.
    fn distribute(&mut self, keys: &[u64]) -> Result<()> {
        let mut counts = vec![0usize; self.k];
        for &x in keys {
            counts[self.bin_of(x)] += 1;
        }
        let mut bins = Vec::with_capacity(self.k);
        let mut start = 0;
        for &c in &counts {
            bins.push(D::build(&keys[start..start + c], &self.params)?);
            start += c;
        }
        self.bins = bins;
        self.sizes = Fenwick::from_counts(&counts);
        self.len = keys.len();
        self.n_at_rebuild = keys.len();
        self.updates_since_rebuild = 0;
        (self.g_min_bound, self.g_max_bound) = gap_stats(keys).map_or((u64::MAX, 0), |g| (g.g_min, g.g_max));
        Ok(())
    }

    fn rebuild(&mut self, trigger: RebuildTrigger, extra: Option<u64>) {
        let mut keys = self.to_sorted_vec();
        if let Some(x) = extra {
            let at = keys.partition_point(|&k| k < x);
            keys.insert(at, x);
        }
        let exact = exact_delta(&keys);
        self.delta_hat = match (trigger, exact) {
            (RebuildTrigger::UpdateCount, Some(e)) => e,
            (RebuildTrigger::DeltaGrowth, Some(e)) => e.max(doubled(self.delta_hat)),
            (RebuildTrigger::OutOfRange, Some(e)) => e.max(self.delta_hat),
            (_, None) => self.delta_hat,
        };
        self.ledger.delta_max_seen = self.ledger.delta_max_seen.max(self.delta_hat);
        if !keys.is_empty() {
            self.layout(&keys);
        }
        let updates_since_previous = self.updates_since_rebuild;
        self.distribute(&keys).expect("dictionary rebuild over sorted keys");
        self.ledger.events.push(RebuildEvent {
            trigger,
            elements_touched: keys.len(),
            updates_since_previous,
            at_update: self.ledger.total_updates,
            delta_hat: self.delta_hat,
        });
    }

    /// Applies the rebuild rules once; returns whether a rebuild ran.
    pub fn maybe_rebuild(&mut self) -> bool {
        if self.updates_since_rebuild >= self.window() {
            self.rebuild(RebuildTrigger::UpdateCount, None);
            return true;
        }
        if self.len >= 2 && Ratio::new(self.g_max_bound as u128, self.g_min_bound as u128) > self.delta_hat {
            self.rebuild(RebuildTrigger::DeltaGrowth, None);
            return true;
        }
        false
    }

    fn select_global(&mut self, rank: usize) -> u64 {
        let (bin, before) = self.sizes.find(rank);
        self.bins[bin].select(rank - before).expect("rank within bin")
    }

    /// Global lower-bound rank of `x`, which must be in range.
    fn rank_in_range(&mut self, x: u64) -> SearchOutcome {
        let b = self.bin_of(x);
        let before = self.sizes.prefix(b);
        self.bins[b].search_mut(x).offset(before)
    }

    pub fn search(&mut self, x: u64) -> SearchOutcome {
        if (x as i128) < self.lo {
            SearchOutcome::new(0, false)
        } else if (x as i128) > self.hi {
            SearchOutcome::new(self.len, false)
        } else {
            self.rank_in_range(x)
        }
    }

    pub fn contains(&mut self, x: u64) -> bool {
        self.search(x).found
    }

    /// Inserts `x`; returns `false` when it was already present.
    pub fn insert(&mut self, x: u64) -> bool {
        if !self.in_range(x) {
            self.ledger.total_updates += 1;
            self.updates_since_rebuild += 1;
            self.rebuild(RebuildTrigger::OutOfRange, Some(x));
            return true;
        }
        let b = self.bin_of(x);
        if !self.bins[b].insert(x) {
            return false;
        }
        self.sizes.add(b, 1);
        self.len += 1;
        let r = self.rank_in_range(x).rank;
        // the new key splits one gap, or extends the set at an end
        if r > 0 {
            let pred = self.select_global(r - 1);
            self.g_min_bound = self.g_min_bound.min(x - pred);
            if r + 1 == self.len {
                self.g_max_bound = self.g_max_bound.max(x - pred);
            }
        }
        if r + 1 < self.len {
            let succ = self.select_global(r + 1);
            self.g_min_bound = self.g_min_bound.min(succ - x);
            if r == 0 {
                self.g_max_bound = self.g_max_bound.max(succ - x);
            }
        }
        self.ledger.total_updates += 1;
        self.updates_since_rebuild += 1;
        self.maybe_rebuild();
        true
    }

    /// Deletes `x`; returns `false` when it was absent.
    pub fn delete(&mut self, x: u64) -> bool {
        if !self.in_range(x) {
            return false;
        }
        let b = self.bin_of(x);
        if !self.bins[b].delete(x) {
            return false;
        }
        self.sizes.add(b, -1);
        self.len -= 1;
        let r = self.rank_in_range(x).rank;
        if r > 0 && r < self.len {
            let merged = self.select_global(r) - self.select_global(r - 1);
            self.g_max_bound = self.g_max_bound.max(merged);
        }
        self.ledger.total_updates += 1;
        self.updates_since_rebuild += 1;
        self.maybe_rebuild();
        true
    }

    /// Full consistency scan; `Err` describes the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let keys = self.to_sorted_vec();
        if keys.len() != self.len {
            return Err(format!("length {} but {} keys stored", self.len, keys.len()));
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err("bins out of order".into());
        }
        let mut seen = 0;
        for (b, bin) in self.bins.iter().enumerate() {
            if self.sizes.prefix(b) != seen {
                return Err(format!("stale prefix count at bin {b}"));
            }
            for x in bin.to_sorted_vec() {
                if !self.in_range(x) || self.bin_of(x) != b {
                    return Err(format!("key {x} stored in bin {b}"));
                }
            }
            seen += bin.len();
        }
        if let Some(exact) = exact_delta(&keys) {
            if exact > self.delta_hat {
                return Err(format!("gap ratio {exact} exceeds delta_hat {}", self.delta_hat));
            }
            let g = gap_stats(&keys).unwrap();
            if g.g_min < self.g_min_bound || g.g_max > self.g_max_bound {
                return Err("gap bounds are not conservative".into());
            }
        }
        if self.updates_since_rebuild >= self.window() {
            return Err("update window overrun".into());
        }
        Ok(())
    }
}
