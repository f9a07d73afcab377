use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::record::SCHEMA_VERSION;
use crate::access::AccessDistribution;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::forest::{optimize_over_k, ForestMode};

/// Access distributions the `forest` command can synthesize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    /// All `2n + 1` outcomes equally likely.
    Uniform,
    /// Only successful searches, equally likely.
    Hits,
    /// Independent uniform weights on every outcome.
    Random,
    /// Successful searches only, Zipf with exponent `s` over a random key order.
    Zipf(f64),
}

impl DistSpec {
    pub fn build(self, n: usize, seed: u64) -> Result<AccessDistribution> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            DistSpec::Uniform => AccessDistribution::uniform_all(n),
            DistSpec::Hits => AccessDistribution::uniform_hits(n),
            DistSpec::Random => {
                let p = (0..n).map(|_| rng.gen::<f64>()).collect();
                let q = (0..=n).map(|_| rng.gen::<f64>()).collect();
                AccessDistribution::from_weights(p, q)
            }
            DistSpec::Zipf(s) => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                let mut p = vec![0.0; n];
                for (r, &i) in order.iter().enumerate() {
                    p[i] = 1.0 / ((r + 1) as f64).powf(s);
                }
                AccessDistribution::from_weights(p, vec![0.0; n + 1])
            }
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Uniform => f.write_str("uniform"),
            DistSpec::Hits => f.write_str("hits"),
            DistSpec::Random => f.write_str("random"),
            DistSpec::Zipf(s) => write!(f, "zipf:{s}"),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!("unknown distribution `{s}`; expected uniform, hits, random or zipf[:S]"))
        };
        Ok(match s.to_ascii_lowercase().as_str() {
            "uniform" => DistSpec::Uniform,
            "hits" => DistSpec::Hits,
            "random" => DistSpec::Random,
            "zipf" => DistSpec::Zipf(1.0),
            other => {
                let e: f64 = other.strip_prefix("zipf:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if !(e.is_finite() && e >= 0.0) {
                    return Err(bad());
                }
                DistSpec::Zipf(e)
            }
        })
    }
}

/// Forest cost for one `k` against the entropy bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestRow {
    pub schema: u32,
    pub dataset_id: String,
    pub dist: String,
    pub mode: String,
    pub k: usize,
    pub cost: f64,
    pub entropy: f64,
    /// `H + 2`.
    pub bound: f64,
    /// `bound - cost`; negative when the bound is violated.
    pub slack: f64,
    pub best: bool,
}

/// Sweeps `k = 1..=k_max` and emits one row per `k`.
#[allow(clippy::too_many_arguments)]
pub fn forest_report(
    dataset_id: &str,
    keys: &[u64],
    dist: &AccessDistribution,
    dist_label: &str,
    k_max: usize,
    mode: ForestMode,
    exec: Execution,
) -> Result<Vec<ForestRow>> {
    let sweep = optimize_over_k(keys, dist, k_max, mode, exec)?;
    let bound = sweep.entropy + 2.0;
    Ok(sweep
        .costs
        .iter()
        .map(|&(k, cost)| ForestRow {
            schema: SCHEMA_VERSION,
            dataset_id: dataset_id.to_string(),
            dist: dist_label.to_string(),
            mode: mode.to_string(),
            k,
            cost,
            entropy: sweep.entropy,
            bound,
            slack: bound - cost,
            best: k == sweep.best.k,
        })
        .collect())
}
