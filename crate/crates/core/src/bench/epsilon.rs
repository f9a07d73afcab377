use super::boost::{check_inputs, plain_overhead_pct};
use super::record::BenchRecord;
use super::timing::{time_learned, time_plain};
use crate::dict::{DictKind, SortedDictionary};
use crate::error::Result;
use crate::exec::Execution;
use crate::segments::{self, epsilon_sweep};

/// Times every dictionary bare and under segmentations with ε over the
/// powers of two up to `n/2`.
pub fn bench_epsilon(
    dataset_id: &str,
    keys: &[u64],
    kinds: &[DictKind],
    queries: &[u64],
    repeats: usize,
    exec: Execution,
) -> Result<Vec<BenchRecord>> {
    check_inputs(keys, queries)?;
    let mut rows = Vec::new();
    for &kind in kinds {
        crate::with_dictionary!(kind, D => epsilon_one::<D>(dataset_id, kind, keys, queries, repeats, exec, &mut rows))?;
    }
    Ok(rows)
}

fn epsilon_one<D: SortedDictionary>(
    dataset_id: &str,
    kind: DictKind,
    keys: &[u64],
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
    for eps in epsilon_sweep(keys.len()) {
        let mut d = segments::build_with::<D>(keys, eps, &params, exec)?;
        let t = time_learned(&mut d, queries, repeats);
        rows.push(BenchRecord::new(
            dataset_id,
            kind,
            "segments",
            eps,
            d.intervals(),
            t,
            d.overhead_pct(),
            base.mean_query_ns,
        ));
    }
    Ok(())
}
