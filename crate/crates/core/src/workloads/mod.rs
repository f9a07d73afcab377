//! Datasets, query workloads and CDF-preserving subsampling.

mod generate;
mod io;
mod queries;
mod stats;
mod subsample;

pub use generate::{gen_clustered, gen_uniform, CLUSTER_OUTLIER_BASE};
pub use io::{load_keys, load_raw, save_keys, save_raw, LoadedKeys};
pub use queries::{gen_queries, QueryWorkload};
pub use stats::{histogram_pdf, kl_divergence, ks_critical, ks_statistic, KS_ALPHA};
pub use subsample::{subsample_matching_cdf, SubsampleDiagnostics, TrialRecord};
