//! Synthetic key sets.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::keys::SortedKeySet;

/// Outliers of [`gen_clustered`] are drawn from `[2^62, 2^63)`.
pub const CLUSTER_OUTLIER_BASE: u64 = 1 << 62;

fn distinct(rng: &mut ChaCha8Rng, universe: u64, n: usize, offset: u64) -> Result<Vec<u64>> {
    if n as u64 > universe {
        return Err(Error::UniverseTooSmall { n: n as u64, universe });
    }
    let len =
        usize::try_from(universe).map_err(|_| Error::InvalidArgument(format!("universe {universe} too large")))?;
    Ok(index::sample(rng, len, n).into_iter().map(|i| offset + i as u64).collect())
}

/// `n` distinct keys drawn uniformly without replacement from `[0, universe)`.
pub fn gen_uniform(n: usize, universe: u64, seed: u64) -> Result<SortedKeySet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = distinct(&mut rng, universe, n, 0)?;
    keys.sort_unstable();
    Ok(SortedKeySet::new(keys)?.with_universe(0, universe.saturating_sub(1)))
}

/// A dense band of `(1 - outlier_fraction) n` keys in `[0, spread)` plus
/// `outlier_fraction n` keys far away in `[2^62, 2^63)`.
pub fn gen_clustered(n: usize, outlier_fraction: f64, spread: u64, seed: u64) -> Result<SortedKeySet> {
    if !(0.0..=1.0).contains(&outlier_fraction) {
        return Err(Error::InvalidArgument(format!("outlier fraction {outlier_fraction} outside [0, 1]")));
    }
    let outliers = (n as f64 * outlier_fraction).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = distinct(&mut rng, spread, n - outliers, 0)?;
    keys.extend(distinct(&mut rng, CLUSTER_OUTLIER_BASE, outliers, CLUSTER_OUTLIER_BASE)?);
    keys.sort_unstable();
    Ok(SortedKeySet::new(keys)?.with_universe(0, 2 * CLUSTER_OUTLIER_BASE - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning;
    use crate::dict::{BranchyBinarySearch, DictParams};
    use crate::keys::gap_stats;

    #[test]
    fn saturated_universe() {
        let k = gen_uniform(10, 10, 42).unwrap();
        assert_eq!(k.as_slice(), (0..10).collect::<Vec<_>>().as_slice());
        assert!(matches!(gen_uniform(11, 10, 1), Err(Error::UniverseTooSmall { n: 11, universe: 10 })));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gen_uniform(1000, 1 << 40, 5).unwrap(), gen_uniform(1000, 1 << 40, 5).unwrap());
        assert_ne!(gen_uniform(1000, 1 << 40, 5).unwrap(), gen_uniform(1000, 1 << 40, 6).unwrap());
        assert_eq!(gen_clustered(1000, 0.01, 5000, 2).unwrap(), gen_clustered(1000, 0.01, 5000, 2).unwrap());
    }

    #[test]
    fn dense_universe_gap_ratio_is_polylog() {
        let n = 100_000usize;
        let ok = (0..100)
            .filter(|&seed| {
                gen_uniform(n, 4 * n as u64, seed).map(|k| gap_stats(&k).unwrap().delta()).unwrap()
                    <= 20.0 * (n as f64).ln()
            })
            .count();
        assert!(ok >= 95, "{ok}");
    }

    #[test]
    fn clustered_keys_empty_most_bins() {
        let n = 100_000;
        let keys = gen_clustered(n, 0.001, 10 * n as u64, 9).unwrap();
        assert_eq!(keys.len(), n);
        assert_eq!(keys.iter().filter(|&&k| k >= CLUSTER_OUTLIER_BASE).count(), 100);
        let d = binning::build::<BranchyBinarySearch>(&keys, n, &DictParams::default()).unwrap();
        assert!(d.empty_intervals() as f64 > 0.9 * n as f64);
    }
}
