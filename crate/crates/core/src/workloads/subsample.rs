//! Uniform subsamples whose CDF matches the source set.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::stats::{histogram_pdf, kl_divergence, ks_critical, ks_statistic, KS_ALPHA};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::keys::SortedKeySet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub ks: f64,
    pub kl: f64,
    /// The KS test did not reject at [`KS_ALPHA`].
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleDiagnostics {
    pub trials: usize,
    pub accepted: usize,
    pub ks_critical: f64,
    /// Smallest KS statistic over all trials.
    pub best_ks: f64,
    /// Trial index of the returned sample.
    pub chosen_trial: Option<usize>,
    pub chosen_kl: f64,
    pub records: Vec<TrialRecord>,
}

impl SubsampleDiagnostics {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }
}

fn draw(keys: &[u64], target_n: usize, seed: u64, trial: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let mut idx = index::sample(&mut rng, keys.len(), target_n).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| keys[i]).collect()
}

/// Draws `trials` uniform subsamples of size `target_n`, keeps those the KS
/// test does not distinguish from `keys`, and returns the kept sample whose
/// histogram has the smallest KL divergence from the source histogram.
pub fn subsample_matching_cdf(
    keys: &SortedKeySet,
    target_n: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<(SortedKeySet, SubsampleDiagnostics)> {
    let n = keys.len();
    if target_n == 0 || target_n >= n {
        return Err(Error::InvalidArgument(format!("target size {target_n} must be in [1, {n})")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let (lo, hi) = (keys[0], keys[n - 1]);
    let bins = (target_n as f64).sqrt().ceil() as usize;
    let source_pdf = histogram_pdf(keys, lo, hi, bins);
    let critical = ks_critical(n, target_n, KS_ALPHA);
    let records = exec.map_indices(trials, |t| {
        let sample = draw(keys, target_n, seed, t);
        let ks = ks_statistic(&sample, keys).expect("nonempty");
        let kl = kl_divergence(&histogram_pdf(&sample, lo, hi, bins), &source_pdf).expect("smoothed");
        TrialRecord { ks, kl, accepted: ks <= critical }
    });
    let chosen =
        records.iter().enumerate().filter(|(_, r)| r.accepted).min_by(|a, b| a.1.kl.total_cmp(&b.1.kl)).map(|(i, _)| i);
    let diag = SubsampleDiagnostics {
        trials,
        accepted: records.iter().filter(|r| r.accepted).count(),
        ks_critical: critical,
        best_ks: records.iter().map(|r| r.ks).fold(f64::INFINITY, f64::min),
        chosen_trial: chosen,
        chosen_kl: chosen.map_or(f64::NAN, |i| records[i].kl),
        records,
    };
    match chosen {
        Some(t) => {
            let sample = SortedKeySet::new(draw(keys, target_n, seed, t))?;
            Ok((sample, diag))
        }
        None => Err(Error::AllTrialsRejected(Box::new(diag))),
    }
}
