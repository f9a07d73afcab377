//! Mixed hit/miss query workloads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::keys::SortedKeySet;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryWorkload {
    /// Queries in the order they are issued.
    pub queries: Vec<u64>,
    /// Whether each query is a member of the key set.
    pub labels: Vec<bool>,
    pub hit_fraction: f64,
    pub seed: u64,
}

impl QueryWorkload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn realized_hit_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&l| l).count() as f64 / self.len().max(1) as f64
    }
}

/// `m` queries: `round(m * hit_fraction)` members drawn with replacement and
/// the rest drawn uniformly from the universe minus the set, shuffled.
pub fn gen_queries(keys: &SortedKeySet, m: usize, hit_fraction: f64, seed: u64) -> Result<QueryWorkload> {
    if keys.is_empty() {
        return Err(Error::EmptyKeySet);
    }
    if !(0.0..=1.0).contains(&hit_fraction) {
        return Err(Error::InvalidArgument(format!("hit fraction {hit_fraction} outside [0, 1]")));
    }
    let hits = (m as f64 * hit_fraction).round() as usize;
    let (lo, hi) = keys.universe().expect("nonempty");
    let universe = (hi - lo) as u128 + 1;
    if hits < m && universe <= keys.len() as u128 {
        return Err(Error::UniverseSaturated);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries: Vec<u64> = (0..hits).map(|_| keys[rng.gen_range(0..keys.len())]).collect();
    while queries.len() < m {
        let x = rng.gen_range(lo..=hi);
        if !keys.contains(x) {
            queries.push(x);
        }
    }
    queries.shuffle(&mut rng);
    let labels = queries.iter().map(|&x| keys.contains(x)).collect();
    Ok(QueryWorkload { queries, labels, hit_fraction, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workloads::gen_uniform;

    #[test]
    fn pure_hits_and_pure_misses() {
        let keys = gen_uniform(1000, 1 << 20, 1).unwrap();
        let w = gen_queries(&keys, 500, 1.0, 2).unwrap();
        assert!(w.queries.iter().all(|&x| keys.contains(x)));
        let w = gen_queries(&keys, 500, 0.0, 2).unwrap();
        assert!(w.queries.iter().all(|&x| !keys.contains(x)));
        assert_eq!(w.realized_hit_fraction(), 0.0);
    }

    #[test]
    fn half_and_half_at_full_scale() {
        let keys = gen_uniform(100_000, 1 << 40, 3).unwrap();
        let w = gen_queries(&keys, 2_000_000, 0.5, 4).unwrap();
        assert_eq!(w.len(), 2_000_000);
        let f = w.realized_hit_fraction();
        assert!((0.49..=0.51).contains(&f), "{f}");
    }

    #[test]
    fn saturated_universe_has_no_misses() {
        let keys = gen_uniform(10, 10, 0).unwrap();
        assert!(matches!(gen_queries(&keys, 10, 0.5, 0), Err(Error::UniverseSaturated)));
        assert!(gen_queries(&keys, 10, 1.0, 0).is_ok());
    }

    #[test]
    fn deterministic() {
        let keys = gen_uniform(100, 1000, 7).unwrap();
        assert_eq!(gen_queries(&keys, 100, 0.5, 8).unwrap(), gen_queries(&keys, 100, 0.5, 8).unwrap());
    }
}
