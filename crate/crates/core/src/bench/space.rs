use serde::Serialize;

use super::boost::check_inputs;
use super::record::{BenchRecord, SCHEMA_VERSION};
use super::timing::{time_learned, time_plain};
use crate::binning;
use crate::dict::{DictKind, SortedDictionary};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::segments::{self, epsilon_sweep};

/// Overhead bounds in percent of `8n`.
pub const DEFAULT_BOUNDS: [f64; 3] = [0.05, 0.07, 0.2];

/// Configurations searched by [`space_bounded`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid {
    pub kinds: Vec<DictKind>,
    pub bins: Vec<usize>,
    pub epsilons: Vec<u64>,
}

impl SpaceGrid {
    /// Powers of two for `k` up to `n` (plus `n` itself) and for `ε` up to `n/2`.
    pub fn powers_of_two(n: usize, kinds: Vec<DictKind>) -> Self {
        let mut bins: Vec<usize> =
            std::iter::successors(Some(1usize), |k| k.checked_mul(2)).take_while(|&k| k <= n).collect();
        if bins.last() != Some(&n) && n > 0 {
            bins.push(n);
        }
        SpaceGrid { kinds, bins, epsilons: epsilon_sweep(n) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceStatus {
    Ok,
    Infeasible,
}

/// Fastest configuration of one model family within one bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceRow {
    pub schema: u32,
    pub dataset_id: String,
    pub bound_pct: f64,
    pub model_id: String,
    pub status: SpaceStatus,
    /// Configurations of this family whose overhead fits the bound.
    pub feasible: usize,
    pub dictionary_id: Option<String>,
    pub model_param: Option<u64>,
    pub space_overhead_pct: Option<f64>,
    pub mean_query_ns: Option<f64>,
}

/// Times every configuration of `grid` once, then for each bound reports
/// the fastest binning and the fastest segmentation whose overhead does not
/// exceed it. Also returns every timed configuration.
pub fn space_bounded(
    dataset_id: &str,
    keys: &[u64],
    queries: &[u64],
    bounds_pct: &[f64],
    grid: &SpaceGrid,
    repeats: usize,
    exec: Execution,
) -> Result<(Vec<SpaceRow>, Vec<BenchRecord>)> {
    check_inputs(keys, queries)?;
    if let Some(b) = bounds_pct.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(Error::InvalidArgument(format!("space bound {b} must be positive")));
    }
    let mut candidates = Vec::new();
    for &kind in &grid.kinds {
        crate::with_dictionary!(kind, D => time_grid::<D>(dataset_id, kind, keys, queries, grid, repeats, exec, &mut candidates))?;
    }
    let mut rows = Vec::new();
    for &bound in bounds_pct {
        for family in ["binning", "segments"] {
            let fits: Vec<&BenchRecord> =
                candidates.iter().filter(|c| c.model_id == family && c.space_overhead_pct <= bound).collect();
            let best = fits.iter().min_by(|a, b| {
                a.mean_query_ns.total_cmp(&b.mean_query_ns).then(a.space_overhead_pct.total_cmp(&b.space_overhead_pct))
            });
            rows.push(SpaceRow {
                schema: SCHEMA_VERSION,
                dataset_id: dataset_id.to_string(),
                bound_pct: bound,
                model_id: family.to_string(),
                status: if best.is_some() { SpaceStatus::Ok } else { SpaceStatus::Infeasible },
                feasible: fits.len(),
                dictionary_id: best.map(|b| b.dictionary_id.clone()),
                model_param: best.map(|b| b.model_param),
                space_overhead_pct: best.map(|b| b.space_overhead_pct),
                mean_query_ns: best.map(|b| b.mean_query_ns),
            });
        }
    }
    Ok((rows, candidates))
}

#[allow(clippy::too_many_arguments)]
fn time_grid<D: SortedDictionary>(
    dataset_id: &str,
    kind: DictKind,
    keys: &[u64],
    queries: &[u64],
    grid: &SpaceGrid,
    repeats: usize,
    exec: Execution,
    out: &mut Vec<BenchRecord>,
) -> Result<()> {
    let params = kind.params();
    let mut plain = D::build(keys, &params)?;
    let base = time_plain(&mut plain, queries, repeats).mean_query_ns;
    drop(plain);
    for &k in &grid.bins {
        let mut d = binning::build_with::<D>(keys, k, &params, exec)?;
        let t = time_learned(&mut d, queries, repeats);
        out.push(BenchRecord::new(dataset_id, kind, "binning", k as u64, k, t, d.overhead_pct(), base));
    }
    for &eps in &grid.epsilons {
        let mut d = segments::build_with::<D>(keys, eps, &params, exec)?;
        let t = time_learned(&mut d, queries, repeats);
        out.push(BenchRecord::new(dataset_id, kind, "segments", eps, d.intervals(), t, d.overhead_pct(), base));
    }
    Ok(())
}
