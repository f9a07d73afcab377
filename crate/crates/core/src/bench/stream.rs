use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::record::SCHEMA_VERSION;
use crate::dict::DynamicDictionary;
use crate::dynamic::{DynamicBinDict, RebuildLedger, RebuildTrigger};
use crate::error::{Error, Result};
use crate::keys::{ratio_to_f64, SearchOutcome};

/// Share of deletes in a uniform stream that target a present key.
const DELETE_HIT_RATE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamOp {
    Insert(u64),
    Delete(u64),
    Search(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamSpec {
    /// Relative weights of inserts, deletes and searches; keys uniform over
    /// the universe, searches half hits.
    Uniform { insert: u32, delete: u32, search: u32 },
    /// Inserts only, each at half the current smallest gap past a random
    /// key, so the gap ratio keeps doubling until gaps reach 1.
    Adversarial,
}

impl FromStr for StreamSpec {
    type Err = Error;

    /// Parses an `i:d:s` weight triple.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad mix `{s}`; expected i:d:s, e.g. 2:1:1"));
        let parts: Vec<u32> = s.split(':').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        match parts[..] {
            [i, d, q] if i + d + q > 0 => Ok(StreamSpec::Uniform { insert: i, delete: d, search: q }),
            _ => Err(bad()),
        }
    }
}

/// A replayable sequence of dictionary operations.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStream {
    pub ops: Vec<StreamOp>,
    pub seed: u64,
    pub spec: StreamSpec,
}

/// Keys currently present, with constant-time random choice.
struct Pool {
    keys: Vec<u64>,
    pos: HashMap<u64, usize>,
}

impl Pool {
    fn new(keys: &[u64]) -> Self {
        Pool { keys: keys.to_vec(), pos: keys.iter().enumerate().map(|(i, &k)| (k, i)).collect() }
    }

    fn insert(&mut self, x: u64) {
        if let std::collections::hash_map::Entry::Vacant(e) = self.pos.entry(x) {
            e.insert(self.keys.len());
            self.keys.push(x);
        }
    }

    fn remove(&mut self, x: u64) {
        if let Some(i) = self.pos.remove(&x) {
            self.keys.swap_remove(i);
            if i < self.keys.len() {
                self.pos.insert(self.keys[i], i);
            }
        }
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> Option<u64> {
        (!self.keys.is_empty()).then(|| self.keys[rng.gen_range(0..self.keys.len())])
    }
}

impl UpdateStream {
    /// `n_ops` operations against a set that starts as `initial`, with keys
    /// drawn from the inclusive `universe`.
    pub fn generate(initial: &[u64], n_ops: usize, universe: (u64, u64), spec: StreamSpec, seed: u64) -> Result<Self> {
        let (lo, hi) = universe;
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty universe [{lo}, {hi}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = match spec {
            StreamSpec::Uniform { insert, delete, search } => {
                let mut pool = Pool::new(initial);
                let total = insert + delete + search;
                (0..n_ops)
                    .map(|_| {
                        let roll = rng.gen_range(0..total);
                        if roll < insert {
                            let x = rng.gen_range(lo..=hi);
                            pool.insert(x);
                            StreamOp::Insert(x)
                        } else if roll < insert + delete {
                            let x = match pool.pick(&mut rng) {
                                Some(x) if rng.gen_bool(DELETE_HIT_RATE) => x,
                                _ => rng.gen_range(lo..=hi),
                            };
                            pool.remove(x);
                            StreamOp::Delete(x)
                        } else {
                            let x = match pool.pick(&mut rng) {
                                Some(x) if rng.gen_bool(0.5) => x,
                                _ => rng.gen_range(lo..=hi),
                            };
                            StreamOp::Search(x)
                        }
                    })
                    .collect()
            }
            StreamSpec::Adversarial => adversarial(initial, n_ops, universe, &mut rng)?,
        };
        Ok(UpdateStream { ops, seed, spec })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

fn adversarial(initial: &[u64], n_ops: usize, universe: (u64, u64), rng: &mut ChaCha8Rng) -> Result<Vec<StreamOp>> {
    if initial.len() < 2 {
        return Err(Error::InsufficientKeys(initial.len()));
    }
    let mut sorted = initial.to_vec();
    let mut g_min = sorted.windows(2).map(|w| w[1] - w[0]).min().expect("two keys");
    let mut ops = Vec::with_capacity(n_ops);
    for _ in 0..n_ops {
        let half = g_min / 2;
        let x = if half > 0 {
            // every gap is at least g_min, so a + g_min/2 is absent
            let a = sorted[rng.gen_range(0..sorted.len() - 1)];
            g_min = half;
            a + half
        } else {
            match (0..64).map(|_| rng.gen_range(universe.0..=universe.1)).find(|x| sorted.binary_search(x).is_err()) {
                Some(x) => x,
                None => {
                    ops.push(StreamOp::Search(rng.gen_range(universe.0..=universe.1)));
                    continue;
                }
            }
        };
        let at = sorted.partition_point(|&k| k < x);
        if at > 0 {
            g_min = g_min.min(x - sorted[at - 1]);
        }
        if at < sorted.len() {
            g_min = g_min.min(sorted[at] - x);
        }
        sorted.insert(at, x);
        ops.push(StreamOp::Insert(x));
    }
    Ok(ops)
}

/// Sorted-list reference implementation with an exact gap multiset.
#[derive(Debug, Clone)]
pub struct Mirror {
    keys: Vec<u64>,
    gaps: BTreeMap<u64, usize>,
}

impl Mirror {
    pub fn new(keys: &[u64]) -> Self {
        let mut m = Mirror { keys: keys.to_vec(), gaps: BTreeMap::new() };
        for w in keys.windows(2) {
            m.add_gap(w[1] - w[0]);
        }
        m
    }

    fn add_gap(&mut self, g: u64) {
        *self.gaps.entry(g).or_insert(0) += 1;
    }

    fn remove_gap(&mut self, g: u64) {
        if let Some(c) = self.gaps.get_mut(&g) {
            *c -= 1;
            if *c == 0 {
                self.gaps.remove(&g);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn search(&self, x: u64) -> SearchOutcome {
        let r = self.keys.partition_point(|&k| k < x);
        SearchOutcome::new(r, self.keys.get(r) == Some(&x))
    }

    pub fn insert(&mut self, x: u64) -> bool {
        let r = self.keys.partition_point(|&k| k < x);
        if self.keys.get(r) == Some(&x) {
            return false;
        }
        let (pred, succ) = (r.checked_sub(1).map(|i| self.keys[i]), self.keys.get(r).copied());
        if let (Some(p), Some(s)) = (pred, succ) {
            self.remove_gap(s - p);
        }
        if let Some(p) = pred {
            self.add_gap(x - p);
        }
        if let Some(s) = succ {
            self.add_gap(s - x);
        }
        self.keys.insert(r, x);
        true
    }

    pub fn delete(&mut self, x: u64) -> bool {
        let r = self.keys.partition_point(|&k| k < x);
        if self.keys.get(r) != Some(&x) {
            return false;
        }
        self.keys.remove(r);
        let (pred, succ) = (r.checked_sub(1).map(|i| self.keys[i]), self.keys.get(r).copied());
        if let Some(p) = pred {
            self.remove_gap(x - p);
        }
        if let Some(s) = succ {
            self.remove_gap(s - x);
        }
        if let (Some(p), Some(s)) = (pred, succ) {
            self.add_gap(s - p);
        }
        true
    }

    /// Exact gap ratio, `None` below two keys.
    pub fn delta(&self) -> Option<f64> {
        let (&min, _) = self.gaps.first_key_value()?;
        let (&max, _) = self.gaps.last_key_value()?;
        Some(max as f64 / min as f64)
    }
}

/// State after one phase of a replayed stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamRow {
    pub schema: u32,
    pub phase: usize,
    pub ops_done: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub searches: usize,
    pub n: usize,
    pub rebuilds_update_count: usize,
    pub rebuilds_delta_growth: usize,
    pub rebuilds_out_of_range: usize,
    pub rebuilds_total: usize,
    pub elements_touched: usize,
    pub touches_per_update: f64,
    pub delta_hat: f64,
    pub delta_exact: Option<f64>,
    pub max_divergence: usize,
}

#[derive(Debug, Clone)]
pub struct StreamReport {
    pub rows: Vec<StreamRow>,
    pub ledger: RebuildLedger,
    /// Initial number of keys.
    pub n_initial: usize,
    pub n_max: usize,
    /// Exact gap ratio of the initial keys.
    pub delta_0: f64,
    /// Largest exact gap ratio seen after any operation.
    pub delta_max: f64,
}

/// Replays `stream` through a [`DynamicBinDict`] with `k` bins and a
/// [`Mirror`], failing on the first disagreement. Emits one row after each
/// of `phases` equal slices of the stream.
pub fn run_stream<D: DynamicDictionary>(
    initial: &[u64],
    k: usize,
    stream: &UpdateStream,
    phases: usize,
) -> Result<StreamReport> {
    let mut dict: DynamicBinDict<D> = DynamicBinDict::build(initial, k)?;
    let mut mirror = Mirror::new(initial);
    let delta_0 = mirror.delta().expect("build checked two keys");
    let mut delta_max = delta_0;
    let mut n_max = initial.len();
    let (mut inserts, mut deletes, mut searches) = (0, 0, 0);
    let phases = phases.max(1);
    let total = stream.ops.len();
    let mut rows = Vec::new();
    let mut next_phase = 0;
    let boundary = |p: usize| (total * (p + 1)).div_ceil(phases);
    let diverged = |i: usize, what: String| Error::OracleDivergence { op_index: i, detail: what };
    let snapshot = |phase: usize,
                    done: usize,
                    (ins, del, sea): (usize, usize, usize),
                    dict: &DynamicBinDict<D>,
                    mirror: &Mirror| {
        let l = dict.ledger();
        StreamRow {
            schema: SCHEMA_VERSION,
            phase,
            ops_done: done,
            inserts: ins,
            deletes: del,
            searches: sea,
            n: dict.len(),
            rebuilds_update_count: l.count(RebuildTrigger::UpdateCount),
            rebuilds_delta_growth: l.count(RebuildTrigger::DeltaGrowth),
            rebuilds_out_of_range: l.count(RebuildTrigger::OutOfRange),
            rebuilds_total: l.events.len(),
            elements_touched: l.elements_touched(),
            touches_per_update: l.touches_per_update(),
            delta_hat: ratio_to_f64(&dict.delta_hat()),
            delta_exact: mirror.delta(),
            max_divergence: 0,
        }
    };
    if total == 0 {
        rows.push(snapshot(0, 0, (0, 0, 0), &dict, &mirror));
    }
    for (i, &op) in stream.ops.iter().enumerate() {
        match op {
            StreamOp::Insert(x) => {
                inserts += 1;
                let (got, want) = (dict.insert(x), mirror.insert(x));
                if got != want {
                    return Err(diverged(i, format!("insert({x}) returned {got}, expected {want}")));
                }
            }
            StreamOp::Delete(x) => {
                deletes += 1;
                let (got, want) = (dict.delete(x), mirror.delete(x));
                if got != want {
                    return Err(diverged(i, format!("delete({x}) returned {got}, expected {want}")));
                }
            }
            StreamOp::Search(x) => {
                searches += 1;
                let (got, want) = (dict.search(x), mirror.search(x));
                if got != want {
                    return Err(diverged(i, format!("search({x}) returned {got:?}, expected {want:?}")));
                }
            }
        }
        if dict.len() != mirror.len() {
            return Err(diverged(i, format!("size {} but oracle holds {}", dict.len(), mirror.len())));
        }
        n_max = n_max.max(mirror.len());
        if let Some(d) = mirror.delta() {
            delta_max = delta_max.max(d);
        }
        while next_phase < phases && i + 1 == boundary(next_phase) {
            rows.push(snapshot(next_phase, i + 1, (inserts, deletes, searches), &dict, &mirror));
            next_phase += 1;
        }
    }
    if dict.to_sorted_vec() != mirror.keys() {
        return Err(diverged(total, "final contents differ".into()));
    }
    Ok(StreamReport { rows, ledger: dict.ledger().clone(), n_initial: initial.len(), n_max, delta_0, delta_max })
}
