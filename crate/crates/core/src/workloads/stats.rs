//! Two-sample Kolmogorov-Smirnov statistic and histogram KL divergence.

use crate::error::{Error, Result};

/// Significance level of the KS acceptance test.
pub const KS_ALPHA: f64 = 0.05;

/// Supremum distance between the empirical CDFs of two sorted samples.
pub fn ks_statistic(a: &[u64], b: &[u64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyKeySet);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample critical value `c(α) sqrt((n + m) / (n m))`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Equal-width histogram over `[lo, hi]` with add-one smoothing, normalized
/// to unit mass.
pub fn histogram_pdf(keys: &[u64], lo: u64, hi: u64, bins: usize) -> Vec<f64> {
    let bins = bins.max(1);
    let width = (hi - lo) as u128 + 1;
    let mut counts = vec![1.0f64; bins];
    for &x in keys.iter().filter(|&&x| lo <= x && x <= hi) {
        counts[((x - lo) as u128 * bins as u128 / width) as usize] += 1.0;
    }
    let total = (keys.len() + bins) as f64;
    counts.iter_mut().for_each(|c| *c /= total);
    counts
}

/// `Σ p ln(p / q)` in nats over entries with `p > 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.is_empty() || p.len() != q.len() {
        return Err(Error::InvalidArgument(format!("pdf lengths {} and {}", p.len(), q.len())));
    }
    let mut kl = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::InvalidArgument("reference pdf is zero where the sample pdf is not".into()));
            }
            kl += a * (a / b).ln();
        }
    }
    Ok(kl.max(0.0))
}
