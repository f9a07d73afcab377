//! Learned binary search forests for known access probabilities.
//!
//! The keys are binned as in [`crate::binning`] and every bin gets its own
//! binary search tree, optimal or weight-balanced, built for the bin's share
//! of the access distribution. A query pays one routing step plus the tree
//! search, so a forest over `k` bins costs `Σ W(B)(1 + C(T(B)))`.
//!
//! Depth convention: the root has depth 0, a key at depth `d` costs `d + 1`
//! comparisons and the external leaf hanging below a node at depth `d` has
//! depth `d + 1`, so `C(T) = Σ p(depth + 1) + Σ q·depth(leaf)`.

use std::fmt;
use std::str::FromStr;

use crate::access::{entropy_bits, AccessDistribution};
use crate::binning::Binning;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Largest key count accepted by exact mode (quadratic time and memory).
pub const EXACT_LIMIT: usize = 5000;

/// Tolerance for comparing costs.
pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestMode {
    Exact,
    Approx,
}

impl fmt::Display for ForestMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForestMode::Exact => "exact",
            ForestMode::Approx => "approx",
        })
    }
}

impl FromStr for ForestMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(ForestMode::Exact),
            "approx" => Ok(ForestMode::Approx),
            _ => Err(Error::InvalidArgument(format!("unknown forest mode `{s}`; expected exact or approx"))),
        }
    }
}

/// Optimal roots of every key interval, stored as an upper triangle.
#[derive(Debug, Clone)]
struct RootTable {
    n: usize,
    roots: Vec<u32>,
}

impl RootTable {
    /// Slot of interval `(i, j)`, `0 <= i < j <= n`.
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n - i * (i.saturating_sub(1)) / 2 + (j - i - 1)
    }
}

/// A binary search tree over `n` keys, given by node and leaf depths.
#[derive(Debug, Clone)]
pub struct BstPlan {
    pub cost: f64,
    /// Depth of key `i` (zero-based), root at 0.
    pub key_depths: Vec<u32>,
    /// Depth of external leaf `i`, `0..=n`.
    pub leaf_depths: Vec<u32>,
    roots: Option<RootTable>,
}

impl BstPlan {
    pub fn len(&self) -> usize {
        self.key_depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.key_depths.is_empty()
    }

    /// One-based root key of the optimal subtree over keys `i+1..=j`
    /// (exact plans only).
    pub fn root(&self, i: usize, j: usize) -> Option<usize> {
        let t = self.roots.as_ref()?;
        (i < j && j <= t.n).then(|| t.roots[t.idx(i, j)] as usize)
    }

    /// `Σ p(depth + 1) + Σ q·depth`, recomputed from the depths.
    pub fn cost_from_depths(&self, p: &[f64], q: &[f64]) -> f64 {
        let keys: f64 = p.iter().zip(&self.key_depths).map(|(&w, &d)| w * (d as f64 + 1.0)).sum();
        let leaves: f64 = q.iter().zip(&self.leaf_depths).map(|(&w, &d)| w * d as f64).sum();
        keys + leaves
    }

    fn drop_roots(mut self) -> Self {
        self.roots = None;
        self
    }
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<()> {
    if q.len() != p.len() + 1 {
        return Err(Error::LengthMismatch { keys: p.len(), dist: q.len() });
    }
    Ok(())
}

/// Walks a tree described by `root_of(i, j)` and records depths.
fn depths(n: usize, root_of: impl Fn(usize, usize, u32) -> usize) -> (Vec<u32>, Vec<u32>) {
    let mut key_depths = vec![0u32; n];
    let mut leaf_depths = vec![0u32; n + 1];
    let mut stack = vec![(0usize, n, 0u32)];
    while let Some((i, j, d)) = stack.pop() {
        if i == j {
            leaf_depths[i] = d;
            continue;
        }
        let r = root_of(i, j, d);
        key_depths[r - 1] = d;
        stack.push((i, r - 1, d + 1));
        stack.push((r, j, d + 1));
    }
    (key_depths, leaf_depths)
}

/// Optimal binary search tree by dynamic programming with Knuth's root
/// monotonicity, `O(n²)` time and space. `p` and `q` need not sum to one.
pub fn optimal_bst(p: &[f64], q: &[f64]) -> Result<BstPlan> {
    check_lengths(p, q)?;
    let n = p.len();
    if n == 0 {
        return Ok(BstPlan { cost: 0.0, key_depths: vec![], leaf_depths: vec![0], roots: None });
    }
    let mut sp = vec![0.0; n + 1];
    let mut sq = vec![0.0; n + 2];
    for i in 0..n {
        sp[i + 1] = sp[i] + p[i];
    }
    for i in 0..=n {
        sq[i + 1] = sq[i] + q[i];
    }
    let weight = |i: usize, j: usize| sp[j] - sp[i] + sq[j + 1] - sq[i];
    // e over 0 <= i <= j <= n, row-major upper triangle including the diagonal
    let row = |i: usize| i * (n + 1) - i * (i.saturating_sub(1)) / 2;
    let e_idx = |i: usize, j: usize| row(i) + (j - i);
    let mut e = vec![0.0f64; row(n) + 1];
    let mut table = RootTable { n, roots: vec![0u32; n * (n + 1) / 2] };
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            let (lo, hi) = if len == 1 {
                (i + 1, i + 1)
            } else {
                (table.roots[table.idx(i, j - 1)] as usize, table.roots[table.idx(i + 1, j)] as usize)
            };
            let mut best = f64::INFINITY;
            let mut best_r = lo;
            for r in lo..=hi {
                let c = e[e_idx(i, r - 1)] + e[e_idx(r, j)];
                if c < best {
                    best = c;
                    best_r = r;
                }
            }
            e[e_idx(i, j)] = best + weight(i, j);
            let slot = table.idx(i, j);
            table.roots[slot] = best_r as u32;
        }
    }
    let (key_depths, leaf_depths) = depths(n, |i, j, _| table.roots[table.idx(i, j)] as usize);
    Ok(BstPlan { cost: e[e_idx(0, n)], key_depths, leaf_depths, roots: Some(table) })
}

/// Weight-balanced tree by bisection of the cumulative access mass,
/// `O(n log n)`.
///
/// Masses are laid out on `[0, 1]` in key order and `s_i` marks the middle of
/// failure interval `i`. Each node owns a dyadic interval and takes as root
/// the last key whose preceding `s` lies at or left of the interval's
/// midpoint.
pub fn approx_bst(p: &[f64], q: &[f64]) -> Result<BstPlan> {
    check_lengths(p, q)?;
    let n = p.len();
    let total: f64 = p.iter().chain(q).sum();
    let uniform = total <= 0.0;
    let (pw, qw): (Vec<f64>, Vec<f64>) = if uniform {
        (vec![1.0; n], vec![1.0; n + 1])
    } else {
        (p.iter().map(|x| x / total).collect(), q.iter().map(|x| x / total).collect())
    };
    let mut s = vec![0.0f64; n + 1];
    s[0] = qw[0] / 2.0;
    for i in 1..=n {
        s[i] = s[i - 1] + qw[i - 1] / 2.0 + pw[i - 1] + qw[i] / 2.0;
    }
    if uniform {
        let top = s[n] + qw[n] / 2.0;
        s.iter_mut().for_each(|v| *v /= top);
    }
    // dyadic interval of every pending subtree, indexed by its left end
    let mut bounds = vec![(0.0f64, 1.0f64); n + 1];
    let (key_depths, leaf_depths) = {
        let bounds = std::cell::RefCell::new(&mut bounds);
        depths(n, |i, j, _| {
            let (lo, hi) = bounds.borrow()[i];
            let cut = (lo + hi) / 2.0;
            let r = if s[i] == s[j] {
                // no mass below this node: any balanced choice will do
                (i + j).div_ceil(2)
            } else {
                i + s[i..j].partition_point(|&v| v <= cut).max(1)
            };
            let mut b = bounds.borrow_mut();
            b[i] = (lo, cut);
            b[r] = (cut, hi);
            r
        })
    };
    let mut plan = BstPlan { cost: 0.0, key_depths, leaf_depths, roots: None };
    plan.cost = plan.cost_from_depths(p, q);
    Ok(plan)
}

fn plan_tree(p: &[f64], q: &[f64], mode: ForestMode) -> Result<BstPlan> {
    match mode {
        ForestMode::Exact => optimal_bst(p, q).map(BstPlan::drop_roots),
        ForestMode::Approx => approx_bst(p, q),
    }
}

/// One bin's share of the access distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BinDistribution {
    /// Rank of the bin's first key.
    pub start: usize,
    pub p: Vec<f64>,
    /// `p.len() + 1` failure masses; the outer two may be partial shares.
    pub q: Vec<f64>,
    pub weight: f64,
}

/// Splits `dist` over the bins of `model`. Interior failure mass stays with
/// its bin; a gap that crosses bin borders is shared in proportion to its
/// overlap with each bin. Mass below the first key goes to the first bin and
/// mass above the last key to the last bin.
pub fn bin_weights(model: &Binning, keys: &[u64], dist: &AccessDistribution) -> Result<Vec<BinDistribution>> {
    if keys.len() != dist.len() {
        return Err(Error::LengthMismatch { keys: keys.len(), dist: dist.len() });
    }
    let (p, q) = (dist.p(), dist.q());
    let n = keys.len();
    let k = model.k();
    let starts = model.partition(keys);
    let mut bins: Vec<BinDistribution> = (0..k)
        .map(|b| {
            let (s, e) = (starts[b], starts[b + 1]);
            let mut local_q = vec![0.0; e - s + 1];
            if e > s {
                local_q[1..e - s].copy_from_slice(&q[s + 1..e]);
            }
            BinDistribution { start: s, p: p[s..e].to_vec(), q: local_q, weight: 0.0 }
        })
        .collect();
    bins[0].q[0] += q[0];
    *bins[k - 1].q.last_mut().unwrap() += q[n];
    for t in 1..n {
        let (a, c) = (keys[t - 1], keys[t]);
        let (ba, bc) = (model.bin_index(a) - 1, model.bin_index(c) - 1);
        if ba == bc {
            continue;
        }
        let (x0, x1) = ((a - model.lo()) as f64, (c - model.lo()) as f64);
        let shares: Vec<f64> = (ba..=bc)
            .map(|b| {
                let (lo, hi) = model.bin_extent(b + 1);
                (x1.min(hi) - x0.max(lo)).max(0.0)
            })
            .collect();
        let total: f64 = shares.iter().sum();
        for (b, share) in (ba..=bc).zip(shares) {
            let mass = if total > 0.0 {
                q[t] * share / total
            } else if b == ba {
                q[t]
            } else {
                0.0
            };
            if b == ba {
                *bins[b].q.last_mut().unwrap() += mass;
            } else {
                bins[b].q[0] += mass;
            }
        }
    }
    for b in &mut bins {
        b.weight = b.p.iter().chain(&b.q).sum();
    }
    Ok(bins)
}

/// Trees for every bin of one `k`.
#[derive(Debug, Clone)]
pub struct ForestPlan {
    pub k: usize,
    pub mode: ForestMode,
    pub weights: Vec<f64>,
    pub trees: Vec<BstPlan>,
    pub total_cost: f64,
}

/// `Σ W(1 + C)` with each tree's unnormalized cost `W·C` read from the plan.
pub fn forest_cost(plan: &ForestPlan) -> f64 {
    plan.weights.iter().zip(&plan.trees).map(|(w, t)| w + t.cost).sum()
}

pub fn forest_plan(keys: &[u64], dist: &AccessDistribution, k: usize, mode: ForestMode) -> Result<ForestPlan> {
    let model = Binning::over(keys, k)?;
    let bins = bin_weights(&model, keys, dist)?;
    let trees = bins.iter().map(|b| plan_tree(&b.p, &b.q, mode)).collect::<Result<Vec<_>>>()?;
    let mut plan = ForestPlan { k, mode, weights: bins.iter().map(|b| b.weight).collect(), trees, total_cost: 0.0 };
    plan.total_cost = forest_cost(&plan);
    Ok(plan)
}

#[derive(Debug, Clone)]
pub struct ForestSweep {
    pub entropy: f64,
    /// `(k, cost)` for every `k` in `1..=k_max`.
    pub costs: Vec<(usize, f64)>,
    pub best: ForestPlan,
}

/// Evaluates forests for `k = 1..=k_max` and keeps the cheapest.
pub fn optimize_over_k(
    keys: &[u64],
    dist: &AccessDistribution,
    k_max: usize,
    mode: ForestMode,
    exec: Execution,
) -> Result<ForestSweep> {
    if k_max == 0 {
        return Err(Error::ZeroBins);
    }
    if mode == ForestMode::Exact && keys.len() > EXACT_LIMIT {
        return Err(Error::ForestTooLarge { n: keys.len(), limit: EXACT_LIMIT });
    }
    let plans = exec.map_indices(k_max, |i| forest_plan(keys, dist, i + 1, mode));
    let plans = plans.into_iter().collect::<Result<Vec<_>>>()?;
    let costs = plans.iter().map(|p| (p.k, p.total_cost)).collect();
    let best = plans
        .into_iter()
        .reduce(|a, b| if b.total_cost < a.total_cost - COST_TOLERANCE { b } else { a })
        .expect("k_max >= 1");
    Ok(ForestSweep { entropy: dist.entropy(), costs, best })
}

/// Entropy of a sub-distribution normalized to unit mass.
pub fn normalized_entropy(p: &[f64], q: &[f64]) -> f64 {
    let w: f64 = p.iter().chain(q).sum();
    if w <= 0.0 {
        return 0.0;
    }
    entropy_bits(p.iter().chain(q).map(|x| x / w))
}
