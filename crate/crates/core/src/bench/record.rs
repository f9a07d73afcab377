use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::timing::Timing;
use crate::dict::DictKind;
use crate::error::{Error, Result};

/// Value of the leading `schema` column in every CSV.
pub const SCHEMA_VERSION: u32 = 1;

/// One timed configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub schema: u32,
    pub dataset_id: String,
    pub dictionary_id: String,
    /// `none`, `binning` or `segments`.
    pub model_id: String,
    /// `k` for binning, `ε` for segments, 0 for the plain dictionary.
    pub model_param: u64,
    /// Number of intervals the model produced.
    pub intervals: usize,
    pub mean_query_ns: f64,
    pub prediction_ns: f64,
    pub final_search_ns: f64,
    pub space_overhead_pct: f64,
    pub ratio_vs_plain: f64,
    pub order_sensitive: bool,
}

impl BenchRecord {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        dataset_id: &str,
        kind: DictKind,
        model_id: &str,
        model_param: u64,
        intervals: usize,
        timing: Timing,
        space_overhead_pct: f64,
        plain_mean_ns: f64,
    ) -> Self {
        BenchRecord {
            schema: SCHEMA_VERSION,
            dataset_id: dataset_id.to_string(),
            dictionary_id: kind.to_string(),
            model_id: model_id.to_string(),
            model_param,
            intervals,
            mean_query_ns: timing.mean_query_ns,
            prediction_ns: timing.prediction_ns,
            final_search_ns: timing.final_search_ns,
            space_overhead_pct,
            ratio_vs_plain: timing.mean_query_ns / plain_mean_ns,
            order_sensitive: kind.order_sensitive(),
        }
    }
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_csv_file<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file))
}
