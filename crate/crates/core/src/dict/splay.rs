use super::{DictParams, DynamicDictionary, SortedDictionary};
use crate::error::Result;
use crate::keys::SearchOutcome;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    key: u64,
    left: u32,
    right: u32,
    parent: u32,
    /// Nodes in the subtree rooted here.
    size: u32,
}

/// Bottom-up splay tree over an index arena, augmented with subtree sizes so
/// that searches report ranks (`splay`).
///
/// Every search splays the last node it touched to the root, so even read
/// queries need `&mut self`.
#[derive(Debug, Clone)]
pub struct SplayTree {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
}

impl Default for SplayTree {
    fn default() -> Self {
        SplayTree::new()
    }
}

impl SplayTree {
    pub fn new() -> Self {
        SplayTree { nodes: Vec::new(), free: Vec::new(), root: NIL }
    }

    pub fn root_key(&self) -> Option<u64> {
        (self.root != NIL).then(|| self.nodes[self.root as usize].key)
    }

    #[inline]
    fn size(&self, v: u32) -> u32 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].size
        }
    }

    #[inline]
    fn pull(&mut self, v: u32) {
        let n = self.nodes[v as usize];
        self.nodes[v as usize].size = 1 + self.size(n.left) + self.size(n.right);
    }

    fn alloc(&mut self, key: u64, parent: u32) -> u32 {
        let node = Node { key, left: NIL, right: NIL, parent, size: 1 };
        match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i
            }
            None => {
                assert!(self.nodes.len() < NIL as usize, "splay tree arena exhausted");
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    /// Rotates `x` above its parent.
    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        if self.nodes[p as usize].left == x {
            let b = self.nodes[x as usize].right;
            self.nodes[p as usize].left = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].right = p;
        } else {
            let b = self.nodes[x as usize].left;
            self.nodes[p as usize].right = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].left = p;
        }
        self.nodes[p as usize].parent = x;
        self.nodes[x as usize].parent = g;
        if g != NIL {
            if self.nodes[g as usize].left == p {
                self.nodes[g as usize].left = x;
            } else {
                self.nodes[g as usize].right = x;
            }
        }
        self.pull(p);
        self.pull(x);
    }

    /// Splays `x` until its parent is `stop`.
    fn splay_below(&mut self, x: u32, stop: u32) {
        loop {
            let p = self.nodes[x as usize].parent;
            if p == stop {
                break;
            }
            let g = self.nodes[p as usize].parent;
            if g != stop {
                let zig_zig = (self.nodes[g as usize].left == p) == (self.nodes[p as usize].left == x);
                if zig_zig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
        if stop == NIL {
            self.root = x;
        }
    }

    fn splay(&mut self, x: u32) {
        self.splay_below(x, NIL);
    }

    /// Descends towards `x`; returns the matching node or the last node visited.
    fn descend(&self, x: u64) -> (u32, bool) {
        let mut cur = self.root;
        let mut last = NIL;
        while cur != NIL {
            last = cur;
            let n = &self.nodes[cur as usize];
            if x == n.key {
                return (cur, true);
            }
            cur = if x < n.key { n.left } else { n.right };
        }
        (last, false)
    }

    fn build_balanced(&mut self, keys: &[u64], parent: u32) -> u32 {
        if keys.is_empty() {
            return NIL;
        }
        let mid = keys.len() / 2;
        let v = self.alloc(keys[mid], parent);
        let left = self.build_balanced(&keys[..mid], v);
        let right = self.build_balanced(&keys[mid + 1..], v);
        let node = &mut self.nodes[v as usize];
        node.left = left;
        node.right = right;
        node.size = keys.len() as u32;
        v
    }

    /// Checks ordering, parent links and sizes. Test helper.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.root != NIL && self.nodes[self.root as usize].parent != NIL {
            return Err("root has a parent".into());
        }
        let mut stack = vec![(self.root, None::<u64>, None::<u64>)];
        while let Some((v, lo, hi)) = stack.pop() {
            if v == NIL {
                continue;
            }
            let n = self.nodes[v as usize];
            if lo.is_some_and(|l| n.key <= l) || hi.is_some_and(|h| n.key >= h) {
                return Err(format!("ordering violated at key {}", n.key));
            }
            if n.size != 1 + self.size(n.left) + self.size(n.right) {
                return Err(format!("stale size at key {}", n.key));
            }
            for c in [n.left, n.right] {
                if c != NIL && self.nodes[c as usize].parent != v {
                    return Err(format!("broken parent link below key {}", n.key));
                }
            }
            stack.push((n.left, lo, Some(n.key)));
            stack.push((n.right, Some(n.key), hi));
        }
        Ok(())
    }
}

impl SortedDictionary for SplayTree {
    const ID: &'static str = "splay";

    fn build(keys: &[u64], _params: &DictParams) -> Result<Self> {
        let mut t = SplayTree { nodes: Vec::with_capacity(keys.len()), free: Vec::new(), root: NIL };
        t.root = t.build_balanced(keys, NIL);
        Ok(t)
    }

    fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    fn aux_heap_bytes(&self) -> usize {
        // node links and sizes beyond the 8-byte key, plus free-list slots
        self.nodes.capacity() * (std::mem::size_of::<Node>() - 8) + self.free.capacity() * 4
    }

    fn search_mut(&mut self, x: u64) -> SearchOutcome {
        let (v, found) = self.descend(x);
        if v == NIL {
            return SearchOutcome::new(0, false);
        }
        self.splay(v);
        let root = self.nodes[v as usize];
        let left = self.size(root.left) as usize;
        if found || root.key > x {
            SearchOutcome::new(left, found)
        } else {
            SearchOutcome::new(left + 1, false)
        }
    }

    fn order_sensitive() -> bool {
        true
    }
}

impl DynamicDictionary for SplayTree {
    fn insert(&mut self, x: u64) -> bool {
        let (v, found) = self.descend(x);
        if found {
            self.splay(v);
            return false;
        }
        let node = self.alloc(x, v);
        if v == NIL {
            self.root = node;
            return true;
        }
        if x < self.nodes[v as usize].key {
            self.nodes[v as usize].left = node;
        } else {
            self.nodes[v as usize].right = node;
        }
        let mut up = v;
        while up != NIL {
            self.nodes[up as usize].size += 1;
            up = self.nodes[up as usize].parent;
        }
        self.splay(node);
        true
    }

    fn delete(&mut self, x: u64) -> bool {
        let (v, found) = self.descend(x);
        if v == NIL {
            return false;
        }
        self.splay(v);
        if !found {
            return false;
        }
        let Node { left, right, .. } = self.nodes[v as usize];
        if left == NIL {
            self.root = right;
            if right != NIL {
                self.nodes[right as usize].parent = NIL;
            }
        } else {
            self.nodes[left as usize].parent = NIL;
            self.root = left;
            let mut max = left;
            while self.nodes[max as usize].right != NIL {
                max = self.nodes[max as usize].right;
            }
            self.splay(max);
            self.nodes[max as usize].right = right;
            if right != NIL {
                self.nodes[right as usize].parent = max;
            }
            self.pull(max);
        }
        self.free.push(v);
        true
    }

    fn select(&mut self, rank: usize) -> Option<u64> {
        if rank >= self.len() {
            return None;
        }
        let mut cur = self.root;
        let mut r = rank as u32;
        loop {
            let n = self.nodes[cur as usize];
            let left = self.size(n.left);
            if r < left {
                cur = n.left;
            } else if r == left {
                break;
            } else {
                r -= left + 1;
                cur = n.right;
            }
        }
        self.splay(cur);
        Some(self.nodes[cur as usize].key)
    }

    fn to_sorted_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let v = stack.pop().unwrap();
            out.push(self.nodes[v as usize].key);
            cur = self.nodes[v as usize].right;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dict::conformance::sweep;
    use crate::keys::oracle_rank_search;

    #[test]
    fn insert_then_search_puts_key_at_root() {
        let mut t = SplayTree::new();
        assert!(t.insert(5));
        assert_eq!(t.search_mut(5), SearchOutcome::new(0, true));
        assert_eq!(t.root_key(), Some(5));
    }

    #[test]
    fn ascending_inserts_then_search_minimum() {
        let mut t = SplayTree::new();
        for k in 1..=7 {
            t.insert(k);
        }
        // ascending inserts leave a left path hanging off 7
        assert_eq!(t.root_key(), Some(7));
        assert_eq!(t.search_mut(1), SearchOutcome::new(0, true));
        assert_eq!(t.root_key(), Some(1));
        t.check_invariants().unwrap();
    }

    #[test]
    fn duplicate_insert_and_absent_delete_are_noops() {
        let mut t = SplayTree::build(&[1, 2, 3], &DictParams::default()).unwrap();
        assert!(!t.insert(2));
        assert!(!t.delete(9));
        assert_eq!(t.len(), 3);
        assert!(t.delete(2));
        assert_eq!(t.to_sorted_vec(), vec![1, 3]);
        assert!(SplayTree::new().search_mut(4) == SearchOutcome::new(0, false));
    }

    #[test]
    fn random_ops_match_sorted_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = SplayTree::new();
        let mut mirror: Vec<u64> = Vec::new();
        for step in 0..10_000 {
            let x = rng.gen_range(0..2_000u64);
            match rng.gen_range(0..3) {
                0 => {
                    let pos = mirror.binary_search(&x);
                    assert_eq!(t.insert(x), pos.is_err());
                    if let Err(p) = pos {
                        mirror.insert(p, x);
                    }
                }
                1 => {
                    let pos = mirror.binary_search(&x);
                    assert_eq!(t.delete(x), pos.is_ok());
                    if let Ok(p) = pos {
                        mirror.remove(p);
                    }
                }
                _ => assert_eq!(t.search_mut(x), oracle_rank_search(&mirror, x)),
            }
            if step % 97 == 0 {
                t.check_invariants().unwrap();
                assert_eq!(t.to_sorted_vec(), mirror);
                if !mirror.is_empty() {
                    let r = rng.gen_range(0..mirror.len());
                    assert_eq!(t.select(r), Some(mirror[r]));
                }
            }
        }
    }

    #[test]
    fn oracle_equivalence() {
        sweep::<SplayTree>(&DictParams::default());
    }
}
