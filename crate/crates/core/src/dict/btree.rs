use super::binary::uniform_lower_bound;
use super::prefetch::prefetch_at;
use super::{DictParams, SortedDictionary, StaticDictionary};
use crate::error::{Error, Result};
use crate::keys::SearchOutcome;

/// Keys laid out as an implicit `(B + 1)`-ary search tree whose nodes are
/// blocks of `B` consecutive slots (`bft`). Block `b` has children
/// `b(B + 1) + 1 ..= b(B + 1) + B + 1`; only slots `< n` exist.
#[derive(Debug, Clone)]
pub struct BTreeLayout {
    permuted: Box<[u64]>,
    block: usize,
}

impl BTreeLayout {
    pub fn permuted(&self) -> &[u64] {
        &self.permuted
    }

    pub fn block_factor(&self) -> usize {
        self.block
    }

    /// First slot of child `c` of the block starting at slot `i`.
    #[inline(always)]
    fn child(&self, c: usize, i: usize) -> usize {
        i * (self.block + 1) + (c + 1) * self.block
    }

    /// Slot of the lower bound of `x`, or `len()` when every key is smaller.
    #[inline]
    pub fn lower_bound_slot(&self, x: u64) -> usize {
        let a = &self.permuted;
        let n = a.len();
        let b = self.block;
        let mut answer = n;
        let mut i = 0usize;
        while i + b <= n {
            prefetch_at(a, self.child(b / 2, i));
            let base = &a[i..i + b];
            let nth = uniform_lower_bound(base, x, || {});
            let current = base[nth % b];
            if current >= x {
                answer = i + nth;
            }
            i = self.child(nth, i);
        }
        if i < n {
            let ret = i + uniform_lower_bound(&a[i..], x, || {});
            return if ret == n { answer } else { ret };
        }
        answer
    }

    /// Number of existing slots in the subtrees of `count` consecutive
    /// sibling blocks starting at block `first`.
    fn forest_size(&self, mut first: usize, mut count: usize) -> usize {
        let (n, b) = (self.permuted.len(), self.block);
        let mut total = 0;
        while count > 0 {
            let Some(start) = first.checked_mul(b).filter(|&s| s < n) else { break };
            total += (n - start).min(count.saturating_mul(b));
            first = first.saturating_mul(b + 1).saturating_add(1);
            count = count.saturating_mul(b + 1);
        }
        total
    }

    /// In-order rank of slot `slot`, from the block path to the root.
    pub fn slot_rank(&self, slot: usize) -> usize {
        let b = self.block;
        let (mut block, offset) = (slot / b, slot % b);
        // children 0..=offset and keys 0..offset of the slot's own block
        let mut rank = offset + self.forest_size(block * (b + 1) + 1, offset + 1);
        while block > 0 {
            let parent = (block - 1) / (b + 1);
            let c = (block - 1) % (b + 1);
            rank += c + self.forest_size(parent * (b + 1) + 1, c);
            block = parent;
        }
        rank
    }

    fn fill(&self, sorted: &[u64], out: &mut [u64], block: usize, next: &mut usize) {
        let n = out.len();
        let b = self.block;
        let start = match block.checked_mul(b) {
            Some(s) if s < n => s,
            _ => return,
        };
        for c in 0..=b {
            self.fill(sorted, out, block * (b + 1) + c + 1, next);
            if c < b && start + c < n {
                out[start + c] = sorted[*next];
                *next += 1;
            }
        }
    }
}

impl SortedDictionary for BTreeLayout {
    const ID: &'static str = "bft";

    fn build(keys: &[u64], params: &DictParams) -> Result<Self> {
        if params.btree_block == 0 {
            return Err(Error::ZeroBlockFactor);
        }
        let mut layout = BTreeLayout { permuted: Box::default(), block: params.btree_block };
        let mut out = vec![0u64; keys.len()];
        let mut next = 0;
        layout.fill(keys, &mut out, 0, &mut next);
        debug_assert_eq!(next, keys.len());
        layout.permuted = out.into();
        Ok(layout)
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

impl StaticDictionary for BTreeLayout {
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
