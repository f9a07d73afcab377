use super::prefetch::prefetch_at;
use super::{DictParams, SortedDictionary, StaticDictionary, KEYS_PER_LINE};
use crate::error::Result;
use crate::keys::SearchOutcome;

const PREFETCH_MULTIPLIER: usize = KEYS_PER_LINE;
const PREFETCH_OFFSET: usize = PREFETCH_MULTIPLIER - 1;

/// Keys stored in breadth-first order of the implicit complete binary search
/// tree: the children of slot `i` are `2i + 1` and `2i + 2` (`bfe`).
#[derive(Debug, Clone)]
pub struct EytzingerLayout {
    permuted: Box<[u64]>,
}

impl EytzingerLayout {
    pub fn permuted(&self) -> &[u64] {
        &self.permuted
    }

    /// Slot index of the lower bound of `x`, or `len()` when every key is smaller.
    #[inline]
    pub fn lower_bound_slot(&self, x: u64) -> usize {
        let a = &self.permuted;
        let n = a.len();
        let mut i = 0usize;
        while i < n {
            prefetch_at(a, PREFETCH_MULTIPLIER * i + PREFETCH_OFFSET);
            i = if x <= a[i] { 2 * i + 1 } else { 2 * i + 2 };
        }
        // undo the right turns taken after the last left turn
        let j = (i + 1) >> ((i + 1).trailing_ones() + 1);
        if j == 0 {
            n
        } else {
            j - 1
        }
    }

    /// In-order rank of slot `slot`.
    #[inline]
    pub fn slot_rank(&self, slot: usize) -> usize {
        inorder_rank(slot, self.permuted.len())
    }
}

/// Sorted position of Eytzinger slot `slot` in a tree of `n` nodes.
///
/// A node at depth `d` with level offset `o` sits at position
/// `(2o + 1) * 2^(h - d)` (1-based) in the perfect tree of height `h`; the
/// absent bottom-level leaves that precede it are subtracted.
#[inline]
pub(crate) fn inorder_rank(slot: usize, n: usize) -> usize {
    debug_assert!(slot < n);
    let k = slot + 1;
    let depth = usize::BITS - 1 - k.leading_zeros();
    let height = usize::BITS - 1 - n.leading_zeros();
    let position = (2 * (k - (1 << depth)) + 1) << (height - depth);
    let bottom_present = n - ((1 << height) - 1);
    let missing_before = (position / 2).saturating_sub(bottom_present);
    position - 1 - missing_before
}

fn fill_inorder(sorted: &[u64], out: &mut [u64], slot: usize, next: &mut usize) {
    if slot >= out.len() {
        return;
    }
    fill_inorder(sorted, out, 2 * slot + 1, next);
    out[slot] = sorted[*next];
    *next += 1;
    fill_inorder(sorted, out, 2 * slot + 2, next);
}

impl SortedDictionary for EytzingerLayout {
    const ID: &'static str = "bfe";

    fn build(keys: &[u64], _params: &DictParams) -> Result<Self> {
        let mut permuted = vec![0u64; keys.len()];
        let mut next = 0;
        fill_inorder(keys, &mut permuted, 0, &mut next);
        Ok(EytzingerLayout { permuted: permuted.into() })
    }

    fn len(&self) -> usize {
        self.permuted.len()
    }

    fn aux_heap_bytes(&self) -> usize {
        0
    }

    fn search_mut(&mut self, x: u64) -> SearchOutcome {
        self.search(x)
    }
}

impl StaticDictionary for EytzingerLayout {
    #[inline]
    fn search(&self, x: u64) -> SearchOutcome {
        let slot = self.lower_bound_slot(x);
        if slot == self.permuted.len() {
            SearchOutcome::new(slot, false)
        } else {
            SearchOutcome::new(self.slot_rank(slot), self.permuted[slot] == x)
        }
    }
}
