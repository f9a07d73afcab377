use super::record::BenchRecord;
use super::timing::{time_learned, time_plain};
use crate::binning::{self, k_for_percentage};
use crate::dict::{DictKind, SortedDictionary};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Bin counts as percentages of `n`, from a single bin up to one bin per key.
pub const DEFAULT_PERCENTAGES: [f64; 7] = [0.0, 1.0, 5.0, 10.0, 25.0, 50.0, 100.0];

pub(super) fn check_inputs(keys: &[u64], queries: &[u64]) -> Result<()> {
    if keys.is_empty() {
        return Err(Error::EmptyKeySet);
    }
    if queries.is_empty() {
        return Err(Error::InvalidArgument("empty query workload".into()));
    }
    Ok(())
}

/// Plain size overhead of a bare dictionary, as a percentage of `8n`.
pub(super) fn plain_overhead_pct<D: SortedDictionary>(d: &D) -> f64 {
    100.0 * (std::mem::size_of::<D>() + d.aux_heap_bytes()) as f64 / (8.0 * d.len().max(1) as f64)
}

/// Times every dictionary bare and binned at each percentage of `n`.
/// The first row per dictionary is the plain run all ratios refer to.
pub fn bench_boost(
    dataset_id: &str,
    keys: &[u64],
    kinds: &[DictKind],
    percentages: &[f64],
    queries: &[u64],
    repeats: usize,
    exec: Execution,
) -> Result<Vec<BenchRecord>> {
    check_inputs(keys, queries)?;
    if let Some(p) = percentages.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("bin percentage {p} outside [0, 100]")));
    }
    let mut rows = Vec::new();
    for &kind in kinds {
        crate::with_dictionary!(kind, D => boost_one::<D>(dataset_id, kind, keys, percentages, queries, repeats, exec, &mut rows))?;
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn boost_one<D: SortedDictionary>(
    dataset_id: &str,
    kind: DictKind,
    keys: &[u64],
    percentages: &[f64],
    queries: &[u64],
    repeats: usize,
    exec: Execution,
    rows: &mut Vec<BenchRecord>,
) -> Result<()> {
    let params = kind.params();
    let mut plain = D::build(keys, &params)?;
    let base = time_plain(&mut plain, queries, repeats);
    rows.push(BenchRecord::new(dataset_id, kind, "none", 0, 1, base, plain_overhead_pct(&plain), base.mean_query_ns));
    drop(plain);
    for &pct in percentages {
        let k = k_for_percentage(keys.len(), pct);
        let mut d = binning::build_with::<D>(keys, k, &params, exec)?;
        let t = time_learned(&mut d, queries, repeats);
        rows.push(BenchRecord::new(dataset_id, kind, "binning", k as u64, k, t, d.overhead_pct(), base.mean_query_ns));
    }
    Ok(())
}
