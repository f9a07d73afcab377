use super::binary::uniform_lower_bound;
use super::{DictParams, SortedDictionary, StaticDictionary};
use crate::error::{Error, Result};
use crate::keys::SearchOutcome;

/// Cache-sensitive search tree (`css`).
///
/// The leaf level is the sorted key array cut into nodes of `m` keys. Each
/// internal node holds `m` separators and has up to `m + 1` children; the
/// separator for child `c` is the largest key below that child, unused
/// slots are padded with `u64::MAX`. Internal levels are stored root first in
/// one contiguous array and child `c` of node `j` is node `j(m + 1) + c` of
/// the next level down.
#[derive(Debug, Clone)]
pub struct CssTree {
    leaves: Box<[u64]>,
    directory: Box<[u64]>,
    /// Start offset of each internal level in `directory`, root level first.
    level_offsets: Box<[usize]>,
    fanout: usize,
}

impl CssTree {
    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn internal_levels(&self) -> usize {
        self.level_offsets.len()
    }

    pub fn directory(&self) -> &[u64] {
        &self.directory
    }

    #[inline]
    pub fn lower_bound(&self, x: u64) -> usize {
        let m = self.fanout;
        let mut node = 0usize;
        for &offset in self.level_offsets.iter() {
            let seps = &self.directory[offset + node * m..offset + (node + 1) * m];
            node = node * (m + 1) + uniform_lower_bound(seps, x, || {});
        }
        let start = node * m;
        let end = (start + m).min(self.leaves.len());
        start + uniform_lower_bound(&self.leaves[start..end], x, || {})
    }
}

impl SortedDictionary for CssTree {
    const ID: &'static str = "css";

    fn build(keys: &[u64], params: &DictParams) -> Result<Self> {
        let m = params.css_fanout;
        if m < 2 {
            return Err(Error::BadFanout(m));
        }
        // maximum key of every node, level by level from the leaves up
        let mut maxima: Vec<u64> = keys.chunks(m).map(|c| *c.last().unwrap()).collect();
        let mut levels: Vec<Vec<u64>> = Vec::new();
        while maxima.len() > 1 {
            let parents = maxima.len().div_ceil(m + 1);
            let mut seps = vec![u64::MAX; parents * m];
            let mut next = Vec::with_capacity(parents);
            for (p, children) in maxima.chunks(m + 1).enumerate() {
                for (c, &mx) in children.iter().take(children.len() - 1).enumerate() {
                    seps[p * m + c] = mx;
                }
                next.push(*children.last().unwrap());
            }
            levels.push(seps);
            maxima = next;
        }
        levels.reverse();
        let mut level_offsets = Vec::with_capacity(levels.len());
        let mut directory = Vec::with_capacity(levels.iter().map(Vec::len).sum());
        for level in levels {
            level_offsets.push(directory.len());
            directory.extend(level);
        }
        Ok(CssTree { leaves: keys.into(), directory: directory.into(), level_offsets: level_offsets.into(), fanout: m })
    }

    fn len(&self) -> usize {
        self.leaves.len()
    }

    fn aux_heap_bytes(&self) -> usize {
        std::mem::size_of_val(&*self.directory) + std::mem::size_of_val(&*self.level_offsets)
    }

    fn search_mut(&mut self, x: u64) -> SearchOutcome {
        self.search(x)
    }
}

impl StaticDictionary for CssTree {
    #[inline]
    fn search(&self, x: u64) -> SearchOutcome {
        SearchOutcome::from_lower_bound(&self.leaves, self.lower_bound(x), x)
    }
}
