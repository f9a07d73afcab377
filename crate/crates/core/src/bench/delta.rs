use serde::Serialize;

use super::record::SCHEMA_VERSION;
use crate::error::Result;
use crate::keys::{gap_stats, SortedKeySet};
use crate::workloads::gen_uniform;

/// Sample sizes sized to fit the L1, L2 and L3 caches.
pub const SUBSAMPLE_SIZES: [usize; 3] = [3_700, 31_500, 750_000];

/// Universe size of the dense uniform sets, as a multiple of `n`.
pub const DENSE_UNIVERSE_FACTOR: u64 = 4;

/// Gap ratio of one key set next to the first four powers of `ln n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub schema: u32,
    pub dataset_id: String,
    pub n: usize,
    pub g_min: Option<u64>,
    pub g_max: Option<u64>,
    pub delta: Option<f64>,
    pub ln_n: f64,
    pub ln2_n: f64,
    pub ln3_n: f64,
    pub ln4_n: f64,
    /// `ok`, or why the set was skipped.
    pub status: String,
}

impl DeltaRow {
    pub fn for_keys(dataset_id: &str, keys: &[u64]) -> Self {
        let n = keys.len();
        let ln = (n.max(1) as f64).ln();
        let gaps = gap_stats(keys).ok();
        DeltaRow {
            schema: SCHEMA_VERSION,
            dataset_id: dataset_id.to_string(),
            n,
            g_min: gaps.map(|g| g.g_min),
            g_max: gaps.map(|g| g.g_max),
            delta: gaps.map(|g| g.delta()),
            ln_n: ln,
            ln2_n: ln.powi(2),
            ln3_n: ln.powi(3),
            ln4_n: ln.powi(4),
            status: if gaps.is_some() { "ok".into() } else { format!("skipped: {n} keys, need at least 2") },
        }
    }
}

pub fn delta_report<'a>(datasets: impl IntoIterator<Item = (&'a str, &'a [u64])>) -> Vec<DeltaRow> {
    datasets.into_iter().map(|(id, keys)| DeltaRow::for_keys(id, keys)).collect()
}

/// Uniform set of `n` keys over a universe of `4n`.
pub fn dense_uniform(n: usize, seed: u64) -> Result<SortedKeySet> {
    gen_uniform(n, n as u64 * DENSE_UNIVERSE_FACTOR, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::FIG_KEYS;

    #[test]
    fn example_row() {
        let r = DeltaRow::for_keys("fig", &FIG_KEYS);
        assert!((r.delta.unwrap() - 421.0 / 12.0).abs() < 1e-12);
        assert!((r.ln_n - 10f64.ln()).abs() < 1e-12);
        assert!((r.ln4_n - 10f64.ln().powi(4)).abs() < 1e-9);
        assert_eq!(r.status, "ok");
    }

    #[test]
    fn equal_spacing_and_tiny_sets() {
        let keys: Vec<u64> = (0..50).map(|i| 10 * i).collect();
        let rows = delta_report([("eq", &keys[..]), ("one", &keys[..1])]);
        assert_eq!(rows[0].delta, Some(1.0));
        assert!(rows[0].delta.unwrap() < rows[0].ln_n);
        assert_eq!(rows[1].delta, None);
        assert!(rows[1].status.starts_with("skipped"));
    }

    #[test]
    fn dense_sets_have_the_requested_size() {
        let s = dense_uniform(3_700, 1).unwrap();
        assert_eq!(s.len(), 3_700);
        assert!(*s.last().unwrap() < 4 * 3_700);
    }
}
